"""Persistent look-up table of curves with used/un-used flags.

File format, one record per line (``#`` starts a comment line)::

    index;status;p;a;b;h;gx;gy

``p, a, b, gx, gy`` are 64 uppercase hex digits without prefix, ``h`` is
plain uppercase hex, ``status`` is 0 (un-used) or 1 (used).

Access control for adding curves is left to filesystem permissions.
Concurrent writers are serialized by an advisory lock on ``<table>.lock``.
"""

from __future__ import annotations

import os
import random
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import gmpy2
from filelock import FileLock, Timeout

from .ecc import PUBLISHED_CURVE_1, PUBLISHED_CURVE_2, CurveParams, is_on_curve, to_hex

# 4**-40 = 2**-80 bound on a composite passing
PRIMALITY_ROUNDS = 40
LOCK_TIMEOUT = 10.0

DEFAULT_TABLE = Path(__file__).with_name("data") / "curves.tbl"

NOT_CHECKED = ("rho", "twist-rho", "joint-rho", "safeTransfer", "safeRigid", "safeTwist")


class TableError(Exception):
    """Base class for look-up table failures."""


class TableParseError(TableError):
    pass


class CurveVerificationError(TableError):
    def __init__(self, index: int, check: str, detail: str = ""):
        self.index = index
        self.check = check
        msg = f"record {index}: check {check!r} failed"
        super().__init__(f"{msg} ({detail})" if detail else msg)


class TableConfigError(TableError):
    pass


class TableLockError(TableError):
    pass


@dataclass
class CurveRecord:
    curve: CurveParams
    used: int = 0
    index: int = 0


@dataclass
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "not checked"
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"


@dataclass
class CurveReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if c.status == "fail"]


def is_probable_prime(n: int) -> bool:
    return n > 1 and bool(gmpy2.is_prime(n, PRIMALITY_ROUNDS))


def verify_curve(c: CurveParams) -> CurveReport:
    p = c.p
    checks = [
        ("prime-field", is_probable_prime(p), "p is a probable prime"),
        ("field-size", p > 1 << 254, "p > 2^254"),
        ("a-range", 0 <= c.a < p, "0 <= a < p"),
        ("b-range", 0 <= c.b < p, "0 <= b < p"),
        ("gx-range", 0 <= c.gx < p, "0 <= gx < p"),
        ("gy-range", 0 <= c.gy < p, "0 <= gy < p"),
        ("discriminant", p > 3 and c.discriminant_ok(), "4a^3 + 27b^2 != 0 mod p"),
        ("base-on-curve", p > 3 and is_on_curve(c.G, c), "G satisfies the curve equation"),
        ("cofactor", c.h == 1, "h = 1"),
    ]
    report = CurveReport([CheckResult(n, "pass" if ok else "fail", d) for n, ok, d in checks])
    report.checks.extend(CheckResult(n, "not checked", "requires point counting or pairings")
                         for n in NOT_CHECKED)
    return report


def format_record(rec: CurveRecord) -> str:
    c = rec.curve
    return ";".join([str(rec.index), str(rec.used), to_hex(c.p), to_hex(c.a), to_hex(c.b),
                     format(c.h, "X"), to_hex(c.gx), to_hex(c.gy)])


def parse_record(line: str, lineno: int = 0) -> CurveRecord:
    parts = line.strip().split(";")
    if len(parts) != 8:
        raise TableParseError(f"line {lineno}: expected 8 ';'-separated fields, got {len(parts)}")
    try:
        index, used = int(parts[0]), int(parts[1])
        p, a, b, h, gx, gy = (int(x, 16) for x in parts[2:])
    except ValueError as exc:
        raise TableParseError(f"line {lineno}: {exc}") from None
    if used not in (0, 1):
        raise TableParseError(f"line {lineno}: status must be 0 or 1, got {used}")
    return CurveRecord(CurveParams(p, a, b, gx, gy, h), used, index)


class CurveTable:
    def __init__(self, records, path: Optional[os.PathLike] = None):
        self.records = list(records)
        self.path = Path(path) if path is not None else None

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def statuses(self) -> list[int]:
        return [r.used for r in self.records]

    def unused_count(self) -> int:
        return sum(1 for r in self.records if not r.used)

    def lock(self) -> FileLock:
        if self.path is None:
            raise TableConfigError("table has no backing file to lock")
        return lock_for(self.path)

    def save(self, path: Optional[os.PathLike] = None) -> None:
        save_table(self, path)


def lock_for(path: os.PathLike) -> FileLock:
    return FileLock(str(path) + ".lock", timeout=LOCK_TIMEOUT)


def load_table(path: os.PathLike, verify: bool = True) -> CurveTable:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TableError(f"cannot read table {path}: {exc}") from exc
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        records.append(parse_record(line, lineno))
    if not records:
        raise TableParseError(f"{path}: no curve records")
    indices = [r.index for r in records]
    if len(set(indices)) != len(indices):
        raise TableParseError(f"{path}: duplicate record indices")
    if verify:
        for rec in records:
            failed = verify_curve(rec.curve).failures()
            if failed:
                raise CurveVerificationError(rec.index, failed[0].name, failed[0].detail)
    records.sort(key=lambda r: r.index)
    return CurveTable(records, path)


def save_table(table: CurveTable, path: Optional[os.PathLike] = None) -> None:
    path = Path(path) if path is not None else table.path
    if path is None:
        raise TableConfigError("no path to save the table to")
    lines = ["# index;status;p;a;b;h;gx;gy"]
    lines.extend(format_record(r) for r in table.records)
    data = "\n".join(lines) + "\n"
    fd, tmp = tempfile.mkstemp(prefix=path.name + ".", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise TableError(f"cannot write table {path}: {exc}") from exc


def reset_statuses(table: CurveTable, persist: bool = True) -> None:
    for r in table.records:
        r.used = 0
    if persist and table.path is not None:
        save_table(table)


def select_pair(table: CurveTable, persist: bool = True, freeze: bool = False):
    """Pick the two lowest-indexed un-used records and mark them used.

    When fewer than two un-used records remain every flag is reset first.
    With ``freeze`` the statuses are left untouched (testing aid), so the
    same pair comes back every time.
    """
    if len(table) < 2:
        raise TableConfigError(f"need at least 2 curves in the table, found {len(table)}")
    unused = [r for r in table.records if not r.used]
    if freeze:
        if len(unused) < 2:
            unused = table.records
        return unused[0], unused[1]
    if len(unused) < 2:
        for r in table.records:
            r.used = 0
        unused = table.records
    first, second = unused[0], unused[1]
    first.used = second.used = 1
    if persist and table.path is not None:
        save_table(table)
    return first, second


def select_pair_from_file(path: os.PathLike, freeze: bool = False):
    """Lock, load, select and persist in one step; returns (table, pair)."""
    try:
        with lock_for(path):
            table = load_table(path)
            pair = select_pair(table, persist=True, freeze=freeze)
    except Timeout:
        raise TableLockError(f"could not lock {path} within {LOCK_TIMEOUT}s") from None
    return table, pair


def generate_curve(rng: random.Random, name: str = "") -> CurveParams:
    """Random short-Weierstrass curve over a random 256-bit prime p = 3 mod 4.

    The group order is never computed, so these curves carry no security
    guarantee; they exist to populate rotation tables for testing.
    """
    while True:
        p = rng.getrandbits(256) | (1 << 255) | 3
        if is_probable_prime(p):
            break
    while True:
        a, b = rng.randrange(p), rng.randrange(p)
        c = CurveParams(p, a, b, 0, 0, 1, name)
        if not c.discriminant_ok():
            continue
        x = rng.randrange(p)
        rhs = (x * x * x + a * x + b) % p
        y = pow(rhs, (p + 1) // 4, p)
        if y * y % p == rhs and y:
            return CurveParams(p, a, b, x, y, 1, name)


def build_table(count: int, seed: int = 0, path: Optional[os.PathLike] = None) -> CurveTable:
    """The two published curves followed by ``count - 2`` generated ones."""
    if count < 2:
        raise TableConfigError("a table needs at least 2 curves")
    rng = random.Random(seed)
    curves = [PUBLISHED_CURVE_1, PUBLISHED_CURVE_2]
    curves += [generate_curve(rng, f"generated-{i}") for i in range(2, count)]
    table = CurveTable([CurveRecord(c, 0, i) for i, c in enumerate(curves)], path)
    if path is not None:
        save_table(table)
    return table
