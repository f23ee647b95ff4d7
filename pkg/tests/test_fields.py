import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cryptrisc.fields import (
    GF_INV_TABLE,
    RingElement,
    gf_inv,
    gf_mul,
    ring_add,
    ring_sub,
    rotl,
    rotr,
    xtime,
)

byte = st.integers(0, 255)


def schoolbook_gf_mul(a, b):
    """Carry-less product followed by long division by 0x11B."""
    prod = 0
    for i in range(8):
        if (b >> i) & 1:
            prod ^= a << i
    for bit in range(14, 7, -1):
        if (prod >> bit) & 1:
            prod ^= 0x11B << (bit - 8)
    return prod


@pytest.mark.parametrize(
    "a, b, expected",
    [(0x00, 0x7F, 0x00), (0x01, 0xC3, 0xC3), (0x57, 0x83, 0xC1)],
)
def test_gf_mul_examples(a, b, expected):
    assert gf_mul(a, b) == expected
    assert schoolbook_gf_mul(a, b) == expected


def test_gf_mul_matches_schoolbook_exhaustively():
    for a in range(256):
        for b in range(256):
            assert gf_mul(a, b) == schoolbook_gf_mul(a, b)


def test_gf_mul_rejects_non_bytes():
    with pytest.raises(ValueError):
        gf_mul(256, 1)


def test_gf_inv_examples():
    assert gf_inv(0x01) == 0x01
    brute = next(x for x in range(1, 256) if schoolbook_gf_mul(0x02, x) == 1)
    assert brute == 0x8D
    assert gf_inv(0x02) == 0x8D
    with pytest.raises(ZeroDivisionError):
        gf_inv(0)


def test_gf_inv_exhaustive():
    for a in range(1, 256):
        assert gf_mul(a, gf_inv(a)) == 1
    assert GF_INV_TABLE[0] == 0


def test_field_laws_random():
    rng = random.Random(7)
    for _ in range(10_000):
        a, b, c = rng.randrange(256), rng.randrange(256), rng.randrange(256)
        assert gf_mul(a, gf_mul(b, c)) == gf_mul(gf_mul(a, b), c)
        assert gf_mul(a, b ^ c) == gf_mul(a, b) ^ gf_mul(a, c)


@given(byte, byte)
def test_gf_mul_commutes_and_closes(a, b):
    assert gf_mul(a, b) == gf_mul(b, a) < 256


@given(byte)
def test_xtime_is_mul_by_two(a):
    assert xtime(a) == gf_mul(a, 2)


def test_ring_examples():
    assert ring_add(RingElement(2**64 - 1), RingElement(1)).value == 0
    assert ring_add(RingElement(0, 32), RingElement(0, 32)).value == 0
    assert ring_add(RingElement(0x7FFFFFFF, 32), RingElement(0x7FFFFFFF, 32)).value == 0xFFFFFFFE
    assert (0x7FFFFFFF + 0x7FFFFFFF) % 2**32 == 0xFFFFFFFE
    assert ring_sub(RingElement(0), RingElement(1)).value == 2**64 - 1
    assert ring_sub(RingElement(5, 32), RingElement(3, 32)).value == 2


def test_ring_width_checks():
    with pytest.raises(ValueError):
        ring_add(RingElement(1, 32), RingElement(1, 64))
    with pytest.raises(ValueError):
        ring_sub(RingElement(1, 64), RingElement(1, 32))
    with pytest.raises(ValueError):
        RingElement(2**32, 32)
    with pytest.raises(ValueError):
        RingElement(0, 16)


@pytest.mark.parametrize("width", [32, 64])
def test_ring_round_trip_random(width):
    rng = random.Random(width)
    for _ in range(10_000):
        x = RingElement(rng.getrandbits(width), width)
        r = RingElement(rng.getrandbits(width), width)
        assert ring_sub(ring_add(x, r), r) == x
        assert ring_sub(x, RingElement(0, width)) == x


@given(st.integers(0, 2**64 - 1), st.integers(0, 200))
def test_rotations_invert(x, n):
    assert rotl(rotr(x, n), n) == x
    assert rotr(x & 0xFFFFFFFF, n, 32) == rotl(x & 0xFFFFFFFF, 32 - n % 32, 32)
