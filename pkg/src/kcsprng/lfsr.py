"""Galois-configuration LFSRs and the nine production feedback polynomials.

Bit orientation is fixed project-wide: stage 0 (bit 0 of the state word) is
the output stage, stage ``degree - 1`` is the input stage (MSB).  The tap
mask of x^d + sum(x^e) + 1 has bits at every e and at 0.  A step emits
bit 0, shifts the state right by one and, when the emitted bit is 1, toggles
stages e - 1 for each e and the input stage (``(taps >> 1) | 1 << (d-1)``).
The transition matrix then has the reciprocal polynomial as its
characteristic polynomial, which is primitive exactly when the listed one is.

The nine polynomials are trusted to be primitive as published; primitivity
is not re-verified here.
"""

from __future__ import annotations

from functools import lru_cache

# Exponent sets of x^d + sum(x^e) + 1, listed highest first.
PRODUCTION_POLYNOMIALS: tuple[tuple[int, tuple[int, ...]], ...] = (
    (29, (25, 21, 17, 14, 10, 6, 3)),
    (31, (27, 23, 19, 15, 11, 7, 3)),
    (37, (32, 27, 23, 18, 13, 9, 5)),
    (41, (36, 31, 26, 20, 15, 10, 5)),
    (43, (37, 31, 25, 20, 15, 10, 5)),
    (47, (41, 35, 29, 23, 17, 11, 5)),
    (53, (46, 40, 33, 26, 19, 13, 7)),
    (59, (52, 44, 36, 29, 22, 14, 7)),
    (61, (53, 45, 38, 30, 23, 15, 7)),
)

MAX_DEGREE = 64
_WORD = 64
_WORD_MASK = (1 << _WORD) - 1


def tap_mask(exponents) -> int:
    """Galois tap mask for x^d + sum(x^e for e in exponents) + 1."""
    mask = 1
    for e in exponents:
        mask |= 1 << e
    return mask


def standard_registers() -> list[tuple[int, int]]:
    """The nine production (degree, tap_mask) pairs, L1 first."""
    return [(d, tap_mask(exps)) for d, exps in PRODUCTION_POLYNOMIALS]


class GaloisLfsr:
    __slots__ = ("degree", "taps", "state", "_toggle", "_tables")

    def __init__(self, degree: int, taps: int, state: int = 0):
        if not 2 <= degree <= MAX_DEGREE:
            raise ValueError(f"degree must be in [2, {MAX_DEGREE}], got {degree}")
        if taps >> degree:
            raise ValueError(f"tap mask 0x{taps:X} has bits at or above stage {degree}")
        if not taps & 1:
            raise ValueError("tap mask must include the constant term (bit 0)")
        if state < 0 or state >> degree:
            raise ValueError(f"state does not fit in {degree} bits")
        self.degree = degree
        self.taps = taps
        self.state = state
        self._toggle = (taps >> 1) | (1 << (degree - 1))
        self._tables = None

    def __repr__(self):
        width = (self.degree + 3) // 4
        return f"GaloisLfsr(degree={self.degree}, taps=0x{self.taps:X}, state=0x{self.state:0{width}X})"

    def __eq__(self, other):
        if not isinstance(other, GaloisLfsr):
            return NotImplemented
        return (self.degree, self.taps, self.state) == (other.degree, other.taps, other.state)

    def copy(self) -> GaloisLfsr:
        return GaloisLfsr(self.degree, self.taps, self.state)

    @property
    def msb(self) -> int:
        return (self.state >> (self.degree - 1)) & 1

    def step(self) -> int:
        bit = self.state & 1
        self.state >>= 1
        if bit:
            self.state ^= self._toggle
        return bit

    def inject_msb(self, bit: int) -> None:
        """XOR ``bit`` into the input stage without clocking."""
        self.state ^= (bit & 1) << (self.degree - 1)

    def force_msb(self) -> None:
        self.state |= 1 << (self.degree - 1)

    def run(self, nbits: int) -> int:
        """Clock ``nbits`` times; bit t of the result is the t-th output.

        Equivalent to ``nbits`` calls of :meth:`step` but advances 64 clocks
        per table lookup round.
        """
        if nbits <= 0:
            return 0
        tables = self._tables
        if tables is None:
            tables = self._tables = _jump_tables(self.degree, self.taps)
        nwords, rem = divmod(nbits, _WORD)
        out = bytearray()
        state = self.state
        for _ in range(nwords):
            x = 0
            s = state
            for t in tables:
                x ^= t[s & 0xFF]
                s >>= 8
            out += (x & _WORD_MASK).to_bytes(8, "little")
            state = x >> _WORD
        self.state = state
        result = int.from_bytes(out, "little")
        base = nwords * _WORD
        for t in range(rem):
            result |= self.step() << (base + t)
        return result


@lru_cache(maxsize=None)
def _jump_tables(degree: int, taps: int) -> tuple[list[int], ...]:
    # Stepping is linear over GF(2) in the state, so the 64-clock transition
    # of any state is the XOR of the transitions of its set bits.  Each entry
    # packs (state after 64 clocks) << 64 | (64 output bits, time order LSB).
    basis = []
    for k in range(degree):
        reg = GaloisLfsr(degree, taps, 1 << k)
        out = 0
        for t in range(_WORD):
            out |= reg.step() << t
        basis.append((reg.state << _WORD) | out)
    tables = []
    for chunk in range(0, degree, 8):
        bits = basis[chunk:chunk + 8]
        table = [0] * 256
        for v in range(1, 256):
            low = v & -v
            if low.bit_length() - 1 >= len(bits):
                # bits beyond the register width never occur in a valid state
                table[v] = table[v ^ low]
                continue
            table[v] = table[v ^ low] ^ bits[low.bit_length() - 1]
        tables.append(table)
    return tuple(tables)
