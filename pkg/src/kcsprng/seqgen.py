"""Nonlinear sequence generator: three majority-combined sub-generators
driven in alternating-step mode.

SG1 is the controller.  Each clock steps SG1; a 1 clocks SG2, a 0 clocks
SG3, and the output is the XOR of the most recent SG2 and SG3 bits (both
taken as 0 before their first clock).
"""

from __future__ import annotations

import numpy as np

from .lfsr import GaloisLfsr, standard_registers

KEY_BITS = 401
IV_BITS = 173
DIFFUSION_CLOCKS = 128


class SeedSizeError(ValueError):
    pass


def combiner(x1: int, x2: int, x3: int) -> int:
    """Majority of three bits: x1x2 ^ x2x3 ^ x3x1."""
    return (x1 & x2) ^ (x2 & x3) ^ (x3 & x1)


class SubGenerator:
    __slots__ = ("registers", "label")

    def __init__(self, registers, label: str = ""):
        registers = list(registers)
        if len(registers) != 3:
            raise ValueError("a sub-generator holds exactly three registers")
        if len({r.degree for r in registers}) != 3:
            raise ValueError("sub-generator register degrees must be distinct")
        self.registers = registers
        self.label = label

    def __repr__(self):
        return f"SubGenerator({self.label!r}, {self.registers!r})"

    def copy(self) -> SubGenerator:
        return SubGenerator([r.copy() for r in self.registers], self.label)

    def step(self) -> int:
        a, b, c = self.registers
        return combiner(a.step(), b.step(), c.step())

    def run(self, nbits: int) -> int:
        """``nbits`` outputs packed into an int, bit t = t-th output."""
        a, b, c = (r.run(nbits) for r in self.registers)
        return (a & b) ^ (b & c) ^ (c & a)


class SequenceGenerator:
    __slots__ = ("sg1", "sg2", "sg3", "last_y2", "last_y3")

    def __init__(self, sg1: SubGenerator, sg2: SubGenerator, sg3: SubGenerator,
                 last_y2: int = 0, last_y3: int = 0):
        self.sg1 = sg1
        self.sg2 = sg2
        self.sg3 = sg3
        self.last_y2 = last_y2
        self.last_y3 = last_y3

    @classmethod
    def from_degrees(cls, specs, states=None) -> SequenceGenerator:
        """Build from nine (degree, taps) pairs grouped 3/3/3, SG1 first."""
        specs = list(specs)
        if len(specs) != 9:
            raise ValueError("need nine (degree, taps) pairs")
        states = list(states) if states is not None else [0] * 9
        regs = [GaloisLfsr(d, t, s) for (d, t), s in zip(specs, states)]
        return cls(SubGenerator(regs[0:3], "SG1"),
                   SubGenerator(regs[3:6], "SG2"),
                   SubGenerator(regs[6:9], "SG3"))

    @property
    def registers(self) -> list[GaloisLfsr]:
        return self.sg1.registers + self.sg2.registers + self.sg3.registers

    def state_bits(self) -> list[int]:
        """Concatenated register states, each MSB-first, L1 first."""
        bits = []
        for r in self.registers:
            bits.extend((r.state >> k) & 1 for k in range(r.degree - 1, -1, -1))
        return bits

    def copy(self) -> SequenceGenerator:
        return SequenceGenerator(self.sg1.copy(), self.sg2.copy(), self.sg3.copy(),
                                 self.last_y2, self.last_y3)

    def __eq__(self, other):
        if not isinstance(other, SequenceGenerator):
            return NotImplemented
        return (self.registers == other.registers
                and (self.last_y2, self.last_y3) == (other.last_y2, other.last_y3))

    def step(self) -> int:
        if self.sg1.step():
            self.last_y2 = self.sg2.step()
        else:
            self.last_y3 = self.sg3.step()
        return self.last_y2 ^ self.last_y3

    def bits(self, n: int) -> np.ndarray:
        """Next ``n`` output bits as a uint8 array; same stream as ``n`` steps."""
        if n <= 0:
            return np.zeros(0, dtype=np.uint8)
        control = _unpack(self.sg1.run(n), n)
        taken2 = np.cumsum(control, dtype=np.int64)
        ones = int(taken2[-1])
        taken3 = np.arange(1, n + 1, dtype=np.int64) - taken2
        # index 0 holds the value carried over from before this call
        y2 = np.empty(ones + 1, dtype=np.uint8)
        y2[0] = self.last_y2
        y2[1:] = _unpack(self.sg2.run(ones), ones)
        y3 = np.empty(n - ones + 1, dtype=np.uint8)
        y3[0] = self.last_y3
        y3[1:] = _unpack(self.sg3.run(n - ones), n - ones)
        self.last_y2 = int(y2[-1])
        self.last_y3 = int(y3[-1])
        return y2[taken2] ^ y3[taken3]

    def bits_int(self, n: int) -> int:
        """Next ``n`` bits assembled MSB-first into an integer."""
        value = 0
        for _ in range(n):
            value = (value << 1) | self.step()
        return value


def _unpack(value: int, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    raw = np.frombuffer(value.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n]


def _as_bits(bits, expected: int, what: str) -> list[int]:
    if isinstance(bits, str):
        if set(bits) - {"0", "1"}:
            raise SeedSizeError(f"{what} must be a string of 0/1 characters")
        out = [int(c) for c in bits]
    else:
        out = [int(b) & 1 for b in bits]
    if len(out) != expected:
        raise SeedSizeError(f"{what} must be exactly {expected} bits, got {len(out)}")
    return out


def load_key(key, specs=None) -> SequenceGenerator:
    """Key load stage: key bits fill L1..L9 MSB-first, then MSBs are forced."""
    specs = standard_registers() if specs is None else list(specs)
    total = sum(d for d, _ in specs)
    key = _as_bits(key, total, "key")
    states, pos = [], 0
    for degree, _ in specs:
        value = 0
        for b in key[pos:pos + degree]:
            value = (value << 1) | b
        states.append(value)
        pos += degree
    gen = SequenceGenerator.from_degrees(specs, states)
    for r in gen.registers:
        r.force_msb()
    return gen


def init_seqgen(key, iv, specs=None) -> SequenceGenerator:
    """Load and diffuse a key/IV pair into a fresh sequence generator.

    ``key`` must hold exactly as many bits as the registers have stages (401
    for the production set) and ``iv`` exactly 173 bits.  The IV is absorbed
    one bit per clock: the generator output of that clock is XORed with the
    IV bit and fed into the input stage of each SG1 register.
    """
    gen = load_key(key, specs)
    iv = _as_bits(iv, IV_BITS, "iv")
    for _ in range(DIFFUSION_CLOCKS):
        gen.step()
    sg1 = gen.sg1.registers
    for bit in iv:
        fb = bit ^ gen.step()
        for r in sg1:
            r.inject_msb(fb)
    for _ in range(DIFFUSION_CLOCKS):
        gen.step()
    for r in gen.registers:
        r.force_msb()
    return gen
