import random
import shutil
import sys

import pytest

from kcsprng.curvestore import build_table
from kcsprng.lfsr import tap_mask

# Small primitive polynomials (degree, exponents between x^d and 1).
MINI_POLYS = [(3, [1]), (4, [1]), (5, [2]), (6, [1]), (7, [1]), (9, [4]),
              (10, [3]), (11, [2]), (13, [4, 3, 1])]
TINY_POLYS = [(2, [1]), (3, [1]), (4, [1])] * 3


def specs(polys):
    return [(d, tap_mask(e)) for d, e in polys]


@pytest.fixture(scope="session")
def table_master(tmp_path_factory):
    root = tmp_path_factory.mktemp("tables")
    masters = {}
    for n in (2, 4, 12, 16):
        masters[n] = root / f"curves{n}.tbl"
        build_table(n, seed=7, path=masters[n])
    return masters


@pytest.fixture
def make_table(table_master, tmp_path):
    """Fresh writable copy of an n-curve table (2, 4, 12 or 16 records)."""
    def make(n=12):
        dst = tmp_path / f"t{n}-{random.getrandbits(32):08x}.tbl"
        shutil.copy(table_master[n], dst)
        return dst
    return make


@pytest.fixture
def seed_bytes():
    def make(nseeds=1, seed=0):
        return random.Random(seed).randbytes(72 * nseeds)
    return make


@pytest.fixture
def seed_file(tmp_path, seed_bytes):
    def make(nseeds=1, seed=0):
        path = tmp_path / f"seed-{seed}-{nseeds}.bin"
        path.write_bytes(seed_bytes(nseeds, seed))
        return path
    return make


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.lines():
        terminalreporter.write_line(line)
