import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kcsprng.lfsr import GaloisLfsr, standard_registers, tap_mask
from kcsprng.seqgen import (SeedSizeError, SequenceGenerator, SubGenerator, combiner,
                            init_seqgen, load_key)
from kcsprng.stats import berlekamp_massey

from conftest import MINI_POLYS, TINY_POLYS, specs
from oracles import ReferenceAsg, majority, min_lfsr_length

PROD_POLYS = [(29, [25, 21, 17, 14, 10, 6, 3]), (31, [27, 23, 19, 15, 11, 7, 3]),
              (37, [32, 27, 23, 18, 13, 9, 5]), (41, [36, 31, 26, 20, 15, 10, 5]),
              (43, [37, 31, 25, 20, 15, 10, 5]), (47, [41, 35, 29, 23, 17, 11, 5]),
              (53, [46, 40, 33, 26, 19, 13, 7]), (59, [52, 44, 36, 29, 22, 14, 7]),
              (61, [53, 45, 38, 30, 23, 15, 7])]

# 64 clocks from the alternating 1010... key of MINI_POLYS (MSB forced), taken
# from the reference simulation in tests/oracles.py
MINI_TRACE_64 = "0110100011010100101010000001001011110001000111011101100001010001"


def mini_sg(states=(7, 15, 31)):
    regs = [GaloisLfsr(d, tap_mask(e), s) for (d, e), s in zip(MINI_POLYS[:3], states)]
    return SubGenerator(regs, "SG1")


def rand_bits(rng, n):
    return [rng.getrandbits(1) for _ in range(n)]


@pytest.mark.parametrize("x", list(itertools.product((0, 1), repeat=3)))
def test_combiner_is_majority(x):
    assert combiner(*x) == majority(*x)


def test_combiner_examples():
    assert combiner(0, 0, 0) == 0
    assert combiner(1, 1, 0) == 1
    assert combiner(1, 0, 1) == 1


def test_sg_zero_state():
    sg = mini_sg((0, 0, 0))
    assert [sg.step() for _ in range(10)] == [0] * 10


def test_sg_rejects_duplicate_degrees():
    with pytest.raises(ValueError):
        SubGenerator([GaloisLfsr(3, 3, 1)] * 3)


def test_mini_sg_linear_complexity():
    sg = mini_sg()
    seq = [sg.step() for _ in range(300)]
    assert berlekamp_massey(seq) == 3 * 4 + 4 * 5 + 3 * 5 == 47


def test_mini_sg_period():
    sg = mini_sg()
    seq = np.array([sg.step() for _ in range(2 * 3255 + 50)], dtype=np.uint8)
    assert np.array_equal(seq[:3305], seq[3255:3255 + 3305])
    for p in range(1, 3255):
        if 3255 % p == 0:
            assert not np.array_equal(seq[:2000], seq[p:p + 2000])


def test_first_clock_zero_rule():
    gen = SequenceGenerator.from_degrees(specs(MINI_POLYS), [1] * 9)
    first = gen.sg1.copy().step()
    probe = gen.copy()
    y = (probe.sg2 if first else probe.sg3).step()
    assert gen.step() == y
    if first:
        assert (gen.last_y2, gen.last_y3) == (y, 0)
    else:
        assert (gen.last_y2, gen.last_y3) == (0, y)


def test_mini_trace_frozen():
    total = sum(d for d, _ in MINI_POLYS)
    key = ([1, 0] * total)[:total]
    gen = load_key(key, specs(MINI_POLYS))
    assert "".join(str(gen.step()) for _ in range(64)) == MINI_TRACE_64


def test_matches_reference_simulation():
    rng = random.Random(5)
    total = sum(d for d, _ in MINI_POLYS)
    key = rand_bits(rng, total)
    gen = load_key(key, specs(MINI_POLYS))
    ref = ReferenceAsg(MINI_POLYS, key)
    assert [gen.step() for _ in range(3000)] == [ref.clock() for _ in range(3000)]


def test_key_load_all_ones():
    gen = load_key([1] * 401)
    for r in gen.registers:
        assert r.state == (1 << r.degree) - 1


def test_key_load_order_and_msb_forcing():
    key = [0] * 401
    key[29] = 1  # first bit of L2 lands in its MSB
    key[28] = 1  # last bit of L1 lands in its stage 0
    gen = load_key(key)
    l1, l2 = gen.registers[:2]
    assert l1.state == (1 << 28) | 1
    assert l2.state == 1 << 30
    assert all(r.msb for r in gen.registers)


def test_init_diffusion_frozen():
    rng = random.Random(2024)
    key, iv = rand_bits(rng, 401), rand_bits(rng, 173)
    loaded = load_key(key).state_bits()
    after = init_seqgen(key, iv).state_bits()
    changed = sum(a != b for a, b in zip(loaded, after))
    # 204 from the reference simulation; at least 100 is the requirement
    assert changed == 204
    assert changed >= 100


@pytest.mark.parametrize("seed", range(5))
def test_init_matches_reference(seed):
    rng = random.Random(seed)
    key, iv = rand_bits(rng, 401), rand_bits(rng, 173)
    gen = init_seqgen(key, iv)
    ref = ReferenceAsg(PROD_POLYS, key)
    ref.absorb_iv(iv)
    assert gen.state_bits() == ref.state_bits()
    assert (gen.last_y2, gen.last_y3) == (ref.y2, ref.y3)
    assert [gen.step() for _ in range(500)] == [ref.clock() for _ in range(500)]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=401, max_size=401),
       st.lists(st.integers(0, 1), min_size=173, max_size=173))
def test_init_deterministic_and_nondegenerate(key, iv):
    a, b = init_seqgen(key, iv), init_seqgen("".join(map(str, key)), iv)
    assert a == b
    assert all(r.state and r.msb for r in a.registers)
    assert np.array_equal(a.bits(300), b.bits(300))


@pytest.mark.parametrize("key,iv", [([0] * 400, [0] * 173), ([0] * 401, [0] * 172),
                                    ("01" * 300, [0] * 173)])
def test_init_size_errors(key, iv):
    with pytest.raises(SeedSizeError):
        init_seqgen(key, iv)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32), st.lists(st.integers(1, 700), min_size=1, max_size=6))
def test_bulk_bits_match_single_steps(seed, sizes):
    rng = random.Random(seed)
    gen = init_seqgen(rand_bits(rng, 401), rand_bits(rng, 173))
    ref = gen.copy()
    for n in sizes:
        assert gen.bits(n).tolist() == [ref.step() for _ in range(n)]
    assert gen == ref


def test_mini_asg_exceeds_subgenerator_complexity():
    rng = random.Random(11)
    total = sum(d for d, _ in MINI_POLYS)
    gen = load_key(rand_bits(rng, total), specs(MINI_POLYS))
    lc = [a * b + b * c + a * c for a, b, c in
          (d for d in zip(*[iter([d for d, _ in MINI_POLYS])] * 3))]
    assert lc == [47, 159, 383]
    measured = berlekamp_massey(gen.bits(10_000))
    assert measured > lc[1] + lc[2]


def test_tiny_asg_period_divides_product():
    total = sum(d for d, _ in TINY_POLYS)
    gen = load_key([1] * total, specs(TINY_POLYS))
    for _ in range(200):
        gen.step()
    start = gen.copy()
    period = 0
    while True:
        gen.step()
        period += 1
        if gen == start:
            break
    product = math.prod(2 ** d - 1 for d, _ in TINY_POLYS)
    assert product % period == 0
    out = start.copy().bits(2 * period)
    assert np.array_equal(out[:period], out[period:])


def test_small_brute_force_agrees_with_bm_on_sg_prefix():
    sg = mini_sg()
    seq = [sg.step() for _ in range(12)]
    assert berlekamp_massey(seq) == min_lfsr_length(seq)
