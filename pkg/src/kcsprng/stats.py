"""Native randomness battery for raw bitstreams.

Covers the NIST SP 800-22 frequency, block frequency, runs, longest run,
approximate entropy and serial tests, ENT-style entropy and byte serial
correlation, lag-d autocorrelation, Berlekamp-Massey linear complexity and
the restart (non-reproducibility) harness.  Bit arrays are uint8 0/1;
files are packed MSB-first.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.special import gammaincc

ALPHA = 0.01


class StreamTooShortError(ValueError):
    pass


class InsufficientCurvesError(Exception):
    pass


class BitStream:
    __slots__ = ("bits",)

    def __init__(self, bits):
        self.bits = np.asarray(bits, dtype=np.uint8)
        if self.bits.ndim != 1 or (self.bits > 1).any():
            raise ValueError("a bit stream is a 1-d sequence of 0/1 values")

    def __len__(self):
        return self.bits.size

    @classmethod
    def from_bytes(cls, data: bytes, nbits: Optional[int] = None) -> BitStream:
        bits = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
        return cls(bits if nbits is None else bits[:nbits])

    @classmethod
    def from_file(cls, path, nbits: Optional[int] = None) -> BitStream:
        return cls.from_bytes(Path(path).read_bytes(), nbits)

    @classmethod
    def from_string(cls, s: str) -> BitStream:
        return cls(np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0"))

    def to_bytes(self) -> bytes:
        return np.packbits(self.bits).tobytes()


@dataclass
class TestReport:
    name: str
    statistic: float
    p_value: Optional[float]
    passed: bool
    params: dict = field(default_factory=dict)
    note: str = ""

    def line(self) -> str:
        p = "-" if self.p_value is None else f"{self.p_value:.6f}"
        verdict = "PASS" if self.passed else "FAIL"
        extra = f"  {self.note}" if self.note else ""
        return f"{self.name:<22} stat={self.statistic:<14.6g} p={p:<10} {verdict}{extra}"


def _bits(s) -> np.ndarray:
    return s.bits if isinstance(s, BitStream) else np.asarray(s, dtype=np.uint8)


def _require(n: int, minimum: int, test: str) -> None:
    if n < minimum:
        raise StreamTooShortError(f"{test} needs at least {minimum} bits, got {n}")


def _report(name, stat, p, params, note="") -> TestReport:
    p = float(min(max(p, 0.0), 1.0))
    return TestReport(name, float(stat), p, p >= ALPHA, params, note)


def monobit(s) -> TestReport:
    b = _bits(s)
    n = b.size
    _require(n, 100, "monobit")
    total = 2 * int(b.sum(dtype=np.int64)) - n
    stat = abs(total) / math.sqrt(n)
    return _report("monobit", stat, math.erfc(stat / math.sqrt(2)), {"n": n})


def block_frequency(s, block: int = 128) -> TestReport:
    b = _bits(s)
    n = b.size
    _require(n, 100, "block_frequency")
    nblocks = n // block
    if nblocks < 1:
        raise StreamTooShortError(f"block_frequency needs at least one {block}-bit block")
    props = b[:nblocks * block].reshape(nblocks, block).sum(axis=1, dtype=np.int64) / block
    chi2 = 4.0 * block * float(((props - 0.5) ** 2).sum())
    p = gammaincc(nblocks / 2.0, chi2 / 2.0)
    return _report("block_frequency", chi2, p, {"n": n, "M": block, "N": nblocks})


def runs_test(s) -> TestReport:
    b = _bits(s)
    n = b.size
    _require(n, 100, "runs")
    pi = float(b.sum(dtype=np.int64)) / n
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return TestReport("runs", pi, 0.0, False, {"n": n, "pi": pi},
                          "frequency prerequisite failed")
    v = 1 + int(np.count_nonzero(b[1:] != b[:-1]))
    num = abs(v - 2.0 * n * pi * (1 - pi))
    den = 2.0 * math.sqrt(2.0 * n) * pi * (1 - pi)
    return _report("runs", v, math.erfc(num / den), {"n": n, "pi": pi})


# (minimum n, block length M, class bounds (lowest, highest), probabilities)
_LONGEST_RUN = (
    (750_000, 10_000, (10, 16), (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
    (6_272, 128, (4, 9), (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (128, 8, (1, 4), (0.2148, 0.3672, 0.2305, 0.1875)),
)


def longest_run(s) -> TestReport:
    b = _bits(s)
    n = b.size
    _require(n, 128, "longest_run")
    block, (lo, hi), probs = next((m, c, p) for lim, m, c, p in _LONGEST_RUN if n >= lim)
    nblocks = n // block
    blocks = b[:nblocks * block].reshape(nblocks, block)
    longest = _longest_ones(blocks)
    counts = np.bincount(np.clip(longest, lo, hi) - lo, minlength=hi - lo + 1)
    expected = nblocks * np.asarray(probs)
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    p = gammaincc((len(probs) - 1) / 2.0, chi2 / 2.0)
    return _report("longest_run", chi2, p, {"n": n, "M": block, "N": nblocks})


def _longest_ones(blocks: np.ndarray) -> np.ndarray:
    run = np.zeros(blocks.shape[0], dtype=np.int64)
    best = np.zeros_like(run)
    for col in blocks.T:
        run = (run + 1) * col
        np.maximum(best, run, out=best)
    return best


def _pattern_counts(b: np.ndarray, m: int) -> np.ndarray:
    """Counts of overlapping m-bit patterns with wrap-around."""
    if m == 0:
        return np.array([b.size], dtype=np.int64)
    ext = np.concatenate([b, b[:m - 1]]).astype(np.int64)
    n = b.size
    vals = np.zeros(n, dtype=np.int64)
    for j in range(m):
        vals = (vals << 1) | ext[j:j + n]
    return np.bincount(vals, minlength=1 << m)


def _default_m(n: int, offset: int, cap: int, floor: int) -> int:
    return max(floor, min(cap, int(math.log2(n)) - offset))


def approximate_entropy(s, m: Optional[int] = None) -> TestReport:
    b = _bits(s)
    n = b.size
    _require(n, 100, "approximate_entropy")
    if m is None:
        m = _default_m(n, 6, 10, 2)

    def phi(k):
        c = _pattern_counts(b, k)
        c = c[c > 0] / n
        return float((c * np.log(c)).sum())

    apen = phi(m) - phi(m + 1)
    chi2 = 2.0 * n * (math.log(2) - apen)
    p = gammaincc(2.0 ** (m - 1), chi2 / 2.0)
    return _report("approximate_entropy", chi2, p, {"n": n, "m": m, "apen": apen})


def serial_test(s, m: Optional[int] = None) -> TestReport:
    """Both serial p-values; the report carries the smaller as ``p_value``."""
    b = _bits(s)
    n = b.size
    _require(n, 100, "serial")
    if m is None:
        m = _default_m(n, 3, 16, 3)
    if m < 2:
        raise ValueError("serial test needs m >= 2")

    def psi2(k):
        if k <= 0:
            return 0.0
        c = _pattern_counts(b, k).astype(np.float64)
        return (2.0 ** k / n) * float((c * c).sum()) - n

    p0, p1, p2 = psi2(m), psi2(m - 1), psi2(m - 2)
    d1 = p0 - p1
    d2 = p0 - 2 * p1 + p2
    pv1 = float(gammaincc(2.0 ** (m - 2), d1 / 2.0))
    pv2 = float(gammaincc(2.0 ** (m - 3), d2 / 2.0))
    rep = _report("serial", d1, min(pv1, pv2),
                  {"n": n, "m": m, "p_value1": pv1, "p_value2": pv2, "del2": d2})
    return rep


def autocorrelation(s, d: int) -> TestReport:
    """Lag-d agreement count normalized to an approximately N(0,1) statistic."""
    b = _bits(s)
    n = b.size
    if not 1 <= d <= n // 2:
        raise ValueError(f"lag must lie in [1, {n // 2}], got {d}")
    k = n - d
    disagree = int(np.count_nonzero(b[:k] != b[d:]))
    z = 2.0 * (disagree - k / 2.0) / math.sqrt(k)
    p = math.erfc(abs(z) / math.sqrt(2))
    return _report("autocorrelation", z, p, {"n": n, "d": d, "disagreements": disagree})


def entropy_per_bit(s) -> float:
    b = _bits(s)
    n = b.size
    if n == 0:
        raise StreamTooShortError("empty stream")
    if n < 1_000_000:
        warnings.warn(f"entropy estimate from only {n} bits", stacklevel=2)
    p1 = float(b.sum(dtype=np.int64)) / n
    return -sum(p * math.log2(p) for p in (p1, 1 - p1) if p > 0)


def serial_correlation(s) -> float:
    """ENT's byte-level serial correlation coefficient (circular)."""
    b = _bits(s)
    nbytes = b.size // 8
    if nbytes < 2:
        raise StreamTooShortError("serial correlation needs at least two bytes")
    c = np.packbits(b[:nbytes * 8]).astype(np.float64)
    nxt = np.roll(c, -1)
    t1 = float((c * nxt).sum())
    t2 = float(c.sum()) ** 2
    t3 = float((c * c).sum())
    den = nbytes * t3 - t2
    if den == 0:
        # constant byte sequence: each byte determines the next exactly
        return 1.0
    return (nbytes * t1 - t2) / den


def berlekamp_massey(s) -> int:
    """Linear complexity of a binary sequence over GF(2)."""
    b = _bits(s)
    conn, prev = 1, 1  # connection polynomials, bit i = coefficient of x^i
    lc, shift = 0, 1
    window = 0  # bit i holds s[n - i]
    for n, bit in enumerate(b.tolist()):
        window = (window << 1) | bit
        if (conn & window).bit_count() & 1 == 0:
            shift += 1
        elif 2 * lc <= n:
            conn, prev = conn ^ (prev << shift), conn
            lc = n + 1 - lc
            shift = 1
        else:
            conn ^= prev << shift
            shift += 1
    return lc


NIST_SUBSET = {
    "monobit": monobit,
    "block_frequency": block_frequency,
    "runs": runs_test,
    "longest_run": longest_run,
    "approximate_entropy": approximate_entropy,
    "serial": serial_test,
}


def run_battery(s, tests=None, lags=(1, 2)) -> list[TestReport]:
    """Run the named tests; ``autocorrelation`` expands to one report per lag."""
    tests = list(tests) if tests else list(NIST_SUBSET) + ["autocorrelation"]
    reports = []
    for name in tests:
        if name == "autocorrelation":
            reports.extend(autocorrelation(s, d) for d in lags)
        elif name in NIST_SUBSET:
            reports.append(NIST_SUBSET[name](s))
        else:
            raise ValueError(f"unknown test {name!r}; choose from "
                             f"{', '.join(list(NIST_SUBSET) + ['autocorrelation'])}")
    return reports


def write_report(path, reports, extra: Optional[dict] = None) -> None:
    """Machine-readable JSON copy of a battery run."""
    doc = {"alpha": ALPHA, "tests": [asdict(r) for r in reports]}
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def hamming(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.count_nonzero(np.asarray(a) != np.asarray(b)))


@dataclass
class RestartReport:
    prefix_bits: int
    prefixes: list[str]
    curve_pairs: list[tuple[int, int]]
    distances: list[list[int]]
    mean_fraction: float
    distinct: bool
    passed: bool
    mode: str  # "rotation" or "frozen"
    warnings: list[str] = field(default_factory=list)

    def grid(self) -> str:
        rows = []
        for i, (pfx, pair) in enumerate(zip(self.prefixes, self.curve_pairs), 1):
            shown = pfx if len(pfx) <= 64 else pfx[:64] + "..."
            rows.append(f"run {i}\tcurves {pair[0]},{pair[1]}\t{shown}")
        return "\n".join(rows)


def restart_test(seedfile, table, runs: int, prefix_bits: int, freeze: bool = False,
                 tolerance: float = 0.2, strict: bool = False) -> RestartReport:
    """Boot ``runs`` times from the same seed file and compare output prefixes.

    ``table`` is a table file path; each boot locks, rotates and persists it
    exactly as a real reboot would.  Passing requires pairwise-distinct
    prefixes and a mean pairwise Hamming fraction within 0.5 +/- tolerance.
    With ``freeze`` statuses are not touched and identical prefixes are the
    expected (passing) outcome.
    """
    from .curvestore import load_table
    from .generator import KcsPrng, SeedFileSource

    if runs < 2:
        raise ValueError("restart test needs at least 2 runs")
    if prefix_bits < 1:
        raise ValueError("prefix must hold at least one bit")
    notes = []
    tbl = load_table(table)
    if len(tbl) < 2:
        raise InsufficientCurvesError("table holds fewer than 2 curves")
    if not freeze and tbl.unused_count() < 2 * runs:
        msg = (f"rotation-exhausted: {tbl.unused_count()} un-used curves for {runs} boots "
               f"(need {2 * runs}); statuses will be reset and pairs reused")
        if strict:
            raise InsufficientCurvesError(msg)
        notes.append(msg)
    outputs, pairs = [], []
    for _ in range(runs):
        gen = KcsPrng.boot(SeedFileSource(seedfile), table, freeze=freeze)
        outputs.append(gen.generate(prefix_bits))
        pairs.append(gen.curve_indices)
    dist = [[hamming(a, b) for b in outputs] for a in outputs]
    off_diag = [dist[i][j] for i, j in itertools.combinations(range(runs), 2)]
    mean_fraction = sum(off_diag) / len(off_diag) / prefix_bits
    distinct = all(d > 0 for d in off_diag)
    if freeze:
        identical = not any(off_diag)
        passed = identical
        notes.append("rotation disabled: identical prefixes expected (determinism check)")
    else:
        passed = distinct and abs(mean_fraction - 0.5) <= tolerance
    prefixes = ["".join(map(str, o.tolist())) for o in outputs]
    return RestartReport(prefix_bits, prefixes, pairs, dist, mean_fraction, distinct,
                         passed, "frozen" if freeze else "rotation", notes)
