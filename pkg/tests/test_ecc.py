import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kcsprng.ecc import (IDENTITY, PUBLISHED_CURVE_1, PUBLISHED_CURVE_2, FieldElement,
                         NotInvertibleError, Point, field_convert, field_op, is_on_curve,
                         point_add, point_neg, scalar_mul, to_hex, x_coordinate_bits)

from oracles import jac_mul

C1 = PUBLISHED_CURVE_1
P1 = C1.p

# frozen with gmpy2 and with the affine doubling formula in tests/oracles.py
MUL_X = 0xC0FFEE0123456789ABCDEF0123456789ABCDEF0123456789ABCDEF0123456789
MUL_Y = 0x0DDBA11CAFEBABE5DEADBEEF0BADF00DFEEDFACE8BADF00D1337C0DE99999999
MUL_XY = 0x6A9FC7766A5859166C0589A2DBC1EEE05C805B0E2CF1082F0DE75A48868C09CD
TWO_G = Point(0x6745A15E44EB194FBDD1E1FA39823082A1861EBC36EF18791C4BC7BF75813074,
              0x1B173FB13388872E0419DB35D38D189F89FD19534A41212FA3945978C7D54A30)


def random_point(rng, c=C1):
    # p = 3 mod 4 for both published curves, so sqrt is one exponentiation
    while True:
        x = rng.randrange(c.p)
        rhs = (x ** 3 + c.a * x + c.b) % c.p
        y = pow(rhs, (c.p + 1) // 4, c.p)
        if y * y % c.p == rhs:
            return Point(x, y)


def fe(v, p=P1):
    return FieldElement(v, p)


def test_field_identities():
    x = fe(MUL_X)
    assert field_op("add", x, fe(0)) == x
    assert field_op("mul", fe(2), field_op("inv", fe(2))) == 1
    assert field_op("sub", x, x) == 0
    assert field_op("mul", fe(MUL_X), fe(MUL_Y)).value == MUL_XY


def test_field_errors():
    with pytest.raises(NotInvertibleError):
        field_op("inv", fe(0))
    with pytest.raises(ValueError):
        field_op("add", fe(1), FieldElement(1, PUBLISHED_CURVE_2.p))
    with pytest.raises(ValueError):
        FieldElement(1, 4)


@given(st.integers(1, P1 - 1))
def test_inverse_property(v):
    assert (fe(v) * fe(v).inverse()).value == 1


def test_point_identity_and_inverse():
    G = C1.G
    assert point_add(G, IDENTITY, C1) == G
    assert point_add(IDENTITY, G, C1) == G
    assert point_add(G, point_neg(G, C1), C1) is IDENTITY


def test_doubling_matches_oracle():
    assert point_add(C1.G, C1.G, C1) == TWO_G
    assert scalar_mul(2, C1.G, C1) == TWO_G
    assert is_on_curve(TWO_G, C1)


def test_scalar_mul_basics():
    assert scalar_mul(1, C1.G, C1) == C1.G
    with pytest.raises(ValueError):
        scalar_mul(0, C1.G, C1)


@pytest.mark.parametrize("curve", [PUBLISHED_CURVE_1, PUBLISHED_CURVE_2])
def test_scalar_mul_matches_jacobian_oracle(curve):
    rng = random.Random(3)
    for _ in range(10):
        k = rng.getrandbits(256) or 1
        assert scalar_mul(k, curve.G, curve) == jac_mul(k, curve.gx, curve.gy, curve.a, curve.p)


def test_is_on_curve():
    assert is_on_curve(IDENTITY, C1)
    assert is_on_curve(C1.G, C1)
    assert is_on_curve(PUBLISHED_CURVE_2.G, PUBLISHED_CURVE_2)
    assert not is_on_curve(Point(C1.gx, C1.gy + 1), C1)


def test_group_axioms_small_sample():
    rng = random.Random(9)
    for _ in range(50):
        P, Q, R = (random_point(rng) for _ in range(3))
        assert point_add(P, Q, C1) == point_add(Q, P, C1)
        assert point_add(point_add(P, Q, C1), R, C1) == point_add(P, point_add(Q, R, C1), C1)
        assert is_on_curve(point_add(P, Q, C1), C1)


def test_field_convert():
    assert field_convert("0" * 256, C1) == 1
    assert field_convert(format(12345, "0256b"), C1) == 12345
    assert field_convert(format(P1, "0256b"), C1) == 1
    assert field_convert(format(P1 + 5, "0256b"), C1) == 5
    with pytest.raises(ValueError):
        field_convert("1" * 255, C1)


@given(st.integers(0, 2 ** 256 - 1))
def test_field_convert_range(z):
    assert 1 <= field_convert(format(z, "0256b"), C1) <= P1 - 1


def test_x_coordinate_bits():
    assert x_coordinate_bits(Point(1, 0)) == "0" * 255 + "1"
    assert x_coordinate_bits(C1.G) == format(int("3FBE1FF3CC8A893B2B018CC7D3D61961233F87F66FCB257D21805D1327426DE9", 16), "0256b")
    with pytest.raises(ValueError):
        x_coordinate_bits(IDENTITY)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 2 ** 256 - 1))
def test_x_coordinate_round_trip(k):
    P = scalar_mul(k, C1.G, C1)
    assert is_on_curve(P, C1)
    assert int(x_coordinate_bits(P), 2) == P.x


def test_hex_encoding():
    assert to_hex(C1.p) == "EEAA0DB0A46CE48AFCD288C714939E4063E1D801C55D1118202C76798B62B483"
    assert to_hex(1) == "0" * 63 + "1"
