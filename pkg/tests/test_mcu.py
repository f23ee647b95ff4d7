import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cryptrisc import kernels
from cryptrisc.fdl import MaskMetadata, MaskMode
from cryptrisc.fields import gf_mul
from cryptrisc.mcu import (
    CorruptMaskError,
    LfsrBank,
    MaskedOperand,
    PrngState,
    ZeroStateError,
    _mask_raw,
    derive_state,
    lfsr_step,
    mask,
    prng_next,
    remask,
    unmask,
)

# 99th percentile of chi-square with 255 degrees of freedom
CHI2_255_Q99 = 310.457


def bit_serial_word(state):
    """Independent oracle: taps 64, 63, 61, 60 on a right-shifting register."""
    bits = [(state >> i) & 1 for i in range(64)]
    for _ in range(64):
        fb = bits[0] ^ bits[1] ^ bits[3] ^ bits[4]
        bits = bits[1:] + [fb]
    return sum(b << i for i, b in enumerate(bits))


def test_prng_golden_seed1():
    word, nxt = prng_next(PrngState(1))
    assert word == bit_serial_word(1) == 0xB000000000000001
    assert nxt == PrngState(word)


@given(st.integers(1, 2**64 - 1))
def test_word_step_matches_bit_serial(seed):
    s = seed
    for _ in range(64):
        s = lfsr_step(s)
    assert prng_next(PrngState(seed))[0] == s == bit_serial_word(seed)


def test_prng_determinism_and_zero_seed():
    a1, s = prng_next(PrngState(0xABCDEF))
    a2, _ = prng_next(s)
    b1, s = prng_next(PrngState(0xABCDEF))
    b2, _ = prng_next(s)
    assert (a1, a2) == (b1, b2)
    with pytest.raises(ZeroStateError):
        PrngState(0)
    with pytest.raises(ValueError):
        PrngState(2**64)


def test_no_short_cycle_in_first_million_steps():
    s0 = s = 0x0123456789ABCDEF
    for _ in range(1_000_000 // 64):
        s = kernels.lfsr_advance64(s)
        assert s != s0 and s != 0


def _polymulmod(a, b, poly, deg):
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> deg) & 1:
            a ^= poly
    return r


def _polypow(base, e, poly, deg):
    result = 1
    while e:
        if e & 1:
            result = _polymulmod(result, base, poly, deg)
        base = _polymulmod(base, base, poly, deg)
        e >>= 1
    return result


def test_feedback_polynomial_is_primitive():
    # the recurrence s[n+64] = s[n] ^ s[n+1] ^ s[n+3] ^ s[n+4]
    poly = (1 << 64) | (1 << 4) | (1 << 3) | (1 << 1) | 1
    order = 2**64 - 1
    prime_factors = [3, 5, 17, 257, 641, 65537, 6700417]
    assert math.prod(prime_factors) == order
    assert _polypow(2, order, poly, 64) == 1
    for q in prime_factors:
        assert _polypow(2, order // q, poly, 64) != 1


def test_derive_state_separates_domains():
    seen = {derive_state(42, i, d).state for i in range(50) for d in (1, 2, 3)}
    assert len(seen) == 150


# --- masking ------------------------------------------------------------------


def _const(word):
    return lambda _slot: word


def test_boolean_share_example():
    shares, masks = _mask_raw(0xA5, MaskMode.BOOLEAN, 1, 64, _const(0x0F))
    assert shares == (0xAA,) and masks == ((1, 0x0F),)


def test_arithmetic_share_example():
    shares, _ = _mask_raw(2**64 - 1, MaskMode.ARITHMETIC, 1, 64, _const(1))
    assert shares == (0,)


def test_affine_lane_example():
    assert kernels.affine_fwd64(0x57, 0x83, 0x00) & 0xFF == gf_mul(0x57, 0x83) == 0xC1
    shares, masks = _mask_raw(0x57, MaskMode.AFFINE, 1, 64, _const(0x8383838383838383), "multiplicative")
    assert shares[0] & 0xFF == 0xC1 and masks[0][1] == 0


MODES = [
    (MaskMode.BOOLEAN, 64, "affine"),
    (MaskMode.BOOLEAN, 32, "affine"),
    (MaskMode.ARITHMETIC, 32, "affine"),
    (MaskMode.ARITHMETIC, 64, "affine"),
    (MaskMode.AFFINE, 8, "affine"),
    (MaskMode.AFFINE, 8, "multiplicative"),
]


@pytest.mark.parametrize("mode, width, scheme", MODES)
@pytest.mark.parametrize("k", [1, 2, 3])
def test_round_trip_and_remask(mode, width, scheme, k):
    meta = MaskMetadata(mode, k)
    bits = 64 if mode is MaskMode.AFFINE else width
    rng = random.Random(f"{mode}{width}{scheme}{k}")
    st_ = PrngState(0x5EED)
    for x in [0, 2**bits - 1] + [rng.getrandbits(bits) for _ in range(2000)]:
        m, st_ = mask(x, meta, width, st_, scheme=scheme)
        assert len(m.shares) == k
        assert unmask(m) == x
        m2, st_ = remask(m, st_, scheme=scheme)
        assert unmask(m2) == x
        if mode is MaskMode.AFFINE:
            assert all(((a >> s) & 0xFF) for a, _ in m.masks for s in range(0, 64, 8))
        if scheme == "multiplicative":
            assert all(b == 0 for _, b in m.masks)


def test_remask_is_deterministic():
    meta = MaskMetadata(MaskMode.AFFINE, 2)
    m, _ = mask(0x1122334455667788, meta, rng=PrngState(9))
    r1, s1 = remask(m, PrngState(77))
    r2, s2 = remask(m, PrngState(77))
    assert (r1, s1) == (r2, s2)


def test_mask_argument_errors():
    with pytest.raises(ValueError):
        mask(1, MaskMetadata(MaskMode.NONE, 0), rng=PrngState(1))
    with pytest.raises(ValueError):
        mask(2**32, MaskMetadata(MaskMode.BOOLEAN, 1), 32, PrngState(1))
    with pytest.raises(ValueError):
        mask(1, MaskMetadata(MaskMode.BOOLEAN, 1))


def test_corrupt_affine_multiplier_is_rejected():
    meta = MaskMetadata(MaskMode.AFFINE, 1)
    bad = MaskedOperand(meta, (0x12,), ((0x0101010101010100, 0),), 8)
    with pytest.raises(CorruptMaskError):
        unmask(bad)
    with pytest.raises(ValueError):
        MaskedOperand(meta, (1, 2), ((1, 0),), 8)


def test_nonzero_multipliers_over_many_masks():
    bank = LfsrBank(123)
    meta_draw = bank.draw
    for _ in range(100_000 // 10):
        _, masks = _mask_raw(0, MaskMode.AFFINE, 1, 64, meta_draw)
        a = masks[0][0]
        assert all((a >> s) & 0xFF for s in range(0, 64, 8))


def test_exhaustive_affine_lanes():
    assert kernels.affine_roundtrip_failures() == 0


def _share_byte_chi2(seed):
    meta = MaskMetadata(MaskMode.BOOLEAN, 1)
    m, st_ = mask(0xDEADBEEF, meta, rng=derive_state(seed))
    counts = np.zeros(256)
    for _ in range(10_000):
        m, st_ = remask(m, st_)
        counts[m.shares[0] & 0xFF] += 1
    expected = 10_000 / 256
    return float(np.sum((counts - expected) ** 2 / expected))


def test_share_byte_is_uniform():
    # each run is a 99% test, so one rejection among ten seeds is within chance
    stats = [_share_byte_chi2(seed) for seed in range(10)]
    assert sum(c >= CHI2_255_Q99 for c in stats) <= 1


@pytest.mark.parametrize("mode", [MaskMode.BOOLEAN, MaskMode.ARITHMETIC, MaskMode.AFFINE])
def test_first_order_share_leakage_is_flat(mode):
    # Welch t on share Hamming weight for two very different secrets
    meta = MaskMetadata(mode, 1)
    st_ = derive_state(2718)
    hw = {0: [], 1: []}
    for i in range(10_000):
        x = 0 if i % 2 else 2**64 - 1
        m, st_ = mask(x, meta, 64 if mode is not MaskMode.AFFINE else 8, st_)
        hw[i % 2].append(kernels.popcount64(m.shares[0]))
    a, b = np.array(hw[0], float), np.array(hw[1], float)
    t = (a.mean() - b.mean()) / math.sqrt(a.var(ddof=1) / a.size + b.var(ddof=1) / b.size)
    assert abs(t) < 4.5
