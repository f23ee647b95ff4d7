"""Arithmetic over the three algebraic domains used by the crypto instructions.

* GF(2): plain bitwise logic on 64-bit words (XOR/AND/rotate). No wrapper type;
  callers use Python integer operators together with :func:`rotr` / :func:`rotl`.
* GF(2^8): polynomials over GF(2) reduced modulo the AES polynomial
  x^8 + x^4 + x^3 + x + 1 (``0x11B``).
* Z/2^n Z for n in {32, 64}: wrapping integer addition/subtraction.
"""

from __future__ import annotations

from dataclasses import dataclass

AES_POLY = 0x11B
MASK32 = 0xFFFF_FFFF
MASK64 = 0xFFFF_FFFF_FFFF_FFFF
RING_WIDTHS = (32, 64)


def _slow_mul(a: int, b: int) -> int:
    # shift-and-add with interleaved reduction; only used to build the tables
    p = 0
    while b:
        if b & 1:
            p ^= a
        a <<= 1
        if a & 0x100:
            a ^= AES_POLY
        b >>= 1
    return p


def _build_tables() -> tuple[tuple[int, ...], tuple[int, ...]]:
    exp = [0] * 512
    log = [0] * 256
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x = _slow_mul(x, 0x03)  # 0x03 generates the multiplicative group
    for i in range(255, 512):
        exp[i] = exp[i - 255]
    return tuple(exp), tuple(log)


GF_EXP, GF_LOG = _build_tables()

# Full 256x256 product table, flattened: GF_MUL_TABLE[(a << 8) | b].
GF_MUL_TABLE = bytes(
    0 if a == 0 or b == 0 else GF_EXP[GF_LOG[a] + GF_LOG[b]]
    for a in range(256)
    for b in range(256)
)
GF_INV_TABLE = bytes([0] + [GF_EXP[255 - GF_LOG[a]] for a in range(1, 256)])


def gf_mul(a: int, b: int) -> int:
    """Multiply two GF(2^8) elements modulo 0x11B."""
    if not (0 <= a < 256 and 0 <= b < 256):
        raise ValueError(f"GF(2^8) operands must be bytes, got {a:#x}, {b:#x}")
    return GF_MUL_TABLE[(a << 8) | b]


def gf_inv(a: int) -> int:
    """Multiplicative inverse in GF(2^8).

    Raises:
        ZeroDivisionError: for ``a == 0``, which has no inverse.
    """
    if not 0 <= a < 256:
        raise ValueError(f"GF(2^8) operand must be a byte, got {a:#x}")
    if a == 0:
        raise ZeroDivisionError("0 has no multiplicative inverse in GF(2^8)")
    return GF_INV_TABLE[a]


def xtime(a: int) -> int:
    """Multiply by x (0x02) in GF(2^8)."""
    a <<= 1
    return a ^ AES_POLY if a & 0x100 else a


@dataclass(frozen=True, slots=True)
class RingElement:
    """An element of Z/2^width Z."""

    value: int
    width: int = 64

    def __post_init__(self) -> None:
        if self.width not in RING_WIDTHS:
            raise ValueError(f"unsupported ring width {self.width}")
        if not 0 <= self.value < (1 << self.width):
            raise ValueError(f"{self.value:#x} does not fit in {self.width} bits")


def _check_widths(a: RingElement, b: RingElement) -> int:
    if a.width != b.width:
        raise ValueError(f"ring width mismatch: {a.width} vs {b.width}")
    return (1 << a.width) - 1


def ring_add(a: RingElement, b: RingElement) -> RingElement:
    mask = _check_widths(a, b)
    return RingElement((a.value + b.value) & mask, a.width)


def ring_sub(a: RingElement, b: RingElement) -> RingElement:
    mask = _check_widths(a, b)
    return RingElement((a.value - b.value) & mask, a.width)


def rotr(x: int, n: int, width: int = 64) -> int:
    mask = (1 << width) - 1
    n %= width
    x &= mask
    return ((x >> n) | (x << (width - n))) & mask


def rotl(x: int, n: int, width: int = 64) -> int:
    return rotr(x, width - (n % width), width)


def popcount(x: int) -> int:
    return x.bit_count()
