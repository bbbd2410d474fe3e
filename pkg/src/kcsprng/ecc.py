"""Prime-field and short-Weierstrass arithmetic, affine coordinates.

Points are ``Point(x, y)`` tuples of plain ints; the point at infinity is
``IDENTITY`` (``None``).  Nothing here is constant time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

FIELD_BITS = 256


class NotInvertibleError(ZeroDivisionError):
    pass


class FieldElement:
    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: int):
        if modulus <= 3 or modulus % 2 == 0:
            raise ValueError("modulus must be an odd integer greater than 3")
        self.value = value % modulus
        self.modulus = modulus

    def __repr__(self):
        return f"FieldElement(0x{self.value:X}, p=0x{self.modulus:X})"

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return (self.value, self.modulus) == (other.value, other.modulus)
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise ValueError("field elements have different moduli")
            return other.value
        if isinstance(other, int):
            return other
        raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")

    def __add__(self, other):
        return FieldElement(self.value + self._coerce(other), self.modulus)

    def __sub__(self, other):
        return FieldElement(self.value - self._coerce(other), self.modulus)

    def __mul__(self, other):
        return FieldElement(self.value * self._coerce(other), self.modulus)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.modulus)

    def inverse(self) -> FieldElement:
        if self.value == 0:
            raise NotInvertibleError("zero has no multiplicative inverse")
        return FieldElement(pow(self.value, -1, self.modulus), self.modulus)


def field_op(kind: str, x: FieldElement, y: Optional[FieldElement] = None) -> FieldElement:
    if kind == "inv":
        return x.inverse()
    if y is None:
        raise ValueError(f"{kind} needs two operands")
    if kind == "add":
        return x + y
    if kind == "sub":
        return x - y
    if kind == "mul":
        return x * y
    raise ValueError(f"unknown field operation {kind!r}")


class Point(NamedTuple):
    x: int
    y: int


IDENTITY = None


@dataclass(frozen=True)
class CurveParams:
    p: int
    a: int
    b: int
    gx: int
    gy: int
    h: int = 1
    name: str = ""

    @property
    def G(self) -> Point:
        return Point(self.gx, self.gy)

    def discriminant_ok(self) -> bool:
        return (4 * pow(self.a, 3, self.p) + 27 * self.b * self.b) % self.p != 0


def is_on_curve(P: Optional[Point], c: CurveParams) -> bool:
    if P is IDENTITY:
        return True
    x, y = P
    if not (0 <= x < c.p and 0 <= y < c.p):
        return False
    return (y * y - x * x * x - c.a * x - c.b) % c.p == 0


def point_neg(P: Optional[Point], c: CurveParams) -> Optional[Point]:
    if P is IDENTITY:
        return P
    return Point(P.x, (-P.y) % c.p)


def point_add(P: Optional[Point], Q: Optional[Point], c: CurveParams) -> Optional[Point]:
    if P is IDENTITY:
        return Q
    if Q is IDENTITY:
        return P
    p = c.p
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return IDENTITY
        lam = (3 * x1 * x1 + c.a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return Point(x3, (lam * (x1 - x3) - y1) % p)


def scalar_mul(k: int, P: Optional[Point], c: CurveParams) -> Optional[Point]:
    """k*P by left-to-right double-and-add; k must be positive."""
    if k < 1:
        raise ValueError("scalar must be >= 1")
    R = IDENTITY
    for bit in bin(k)[2:]:
        R = point_add(R, R, c)
        if bit == "1":
            R = point_add(R, P, c)
    return R


def field_convert(z, c: CurveParams) -> int:
    """Map a 256-bit big-endian string (or int) to a nonzero residue mod p."""
    if isinstance(z, int):
        if not 0 <= z < 1 << FIELD_BITS:
            raise ValueError("scalar input must fit in 256 bits")
        value = z
    else:
        bits = z if isinstance(z, str) else "".join(str(int(b) & 1) for b in z)
        if len(bits) != FIELD_BITS:
            raise ValueError(f"expected {FIELD_BITS} bits, got {len(bits)}")
        value = int(bits, 2)
    return value % c.p or 1


def x_coordinate_bits(P: Optional[Point]) -> str:
    if P is IDENTITY:
        raise ValueError("the point at infinity has no x-coordinate")
    return format(P.x, f"0{FIELD_BITS}b")


def to_hex(value: int) -> str:
    """Uppercase, unprefixed, 64-digit big-endian hex."""
    return format(value, "064X")


# Published curves.  Both are checked at table load like any other record.
PUBLISHED_CURVE_1 = CurveParams(
    p=0xEEAA0DB0A46CE48AFCD288C714939E4063E1D801C55D1118202C76798B62B483,
    a=0x33866AAA5914BC27D9ED986D7AF431BD8FC217D8E07D5BA5E44C1A4A355C7DD4,
    b=0xCAA0537DF123F85EC185A991B7200396B996C7921E6A7E07F08ED2A4801B0CA2,
    gx=0x3FBE1FF3CC8A893B2B018CC7D3D61961233F87F66FCB257D21805D1327426DE9,
    gy=0xC5B219E84B008A4CB36CDF05B44E95354913756FCD92251F90BFB0A4F4D84AD8,
    h=1,
    name="curve-1",
)

PUBLISHED_CURVE_2 = CurveParams(
    p=0xF2A284E729748EA8BE82173F13412FC257C42095408D706528F5D8964BF2E237,
    a=0xB29C202E105FE4C7EE5DECAF48258BFAB2E890AF5D96DE4553D82C3EC5D03C06,
    b=0xC36BBDD9EE50EF046EA1D4DA85300673531B323B013043F9DC97B2FDD6A807B4,
    gx=0x1216C78C1FB8707C6B7B2496226B6F13CE25347DD9283A36FA354D09E2CDF4C3,
    gy=0xA0AC0431A50C5DA5D25DCA1026946A2AADA19756ED326DA85A203B4A0B2BE342,
    h=1,
    name="curve-2",
)

for _c in (PUBLISHED_CURVE_1, PUBLISHED_CURVE_2):
    # transcription tripwire: a mistyped constant must stop the import
    if not is_on_curve(_c.G, _c):
        raise ImportError(f"{_c.name}: base point is not on the curve; check the constants")
del _c
