"""Execute-stage masking engine and its LFSR randomness source.

Every scheme is a special case of the lane-wise transform ``x' = A*x + B``:

============  =====  ==========================  ======================
mode          code   A                           "+" / domain
============  =====  ==========================  ======================
Boolean       01     1                           XOR on 32/64-bit words
affine        10     random, every byte != 0     XOR, GF(2^8) per byte
multiplic.    10     random, every byte != 0     B = 0
arithmetic    11     1                           addition mod 2^32/2^64
============  =====  ==========================  ======================

With ``k > 1`` shares the secret is first split into ``k`` parts that fold back
to it (XOR for modes 01/10, modular sum for 11); each part is then masked with
its own ``(A, B)``.

Randomness is threaded explicitly as an immutable :class:`PrngState`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from cryptrisc import kernels
from cryptrisc.fdl import MaskMetadata, MaskMode
from cryptrisc.fields import MASK64

LFSR_TAPS = (64, 63, 61, 60)
LANE_WIDTH = 8

Scheme = Literal["affine", "multiplicative"]


class ZeroStateError(ValueError):
    """The all-zero LFSR state is a fixed point and never allowed."""


class CorruptMaskError(ValueError):
    """A masked operand violates its invariants (e.g. a zero multiplier lane)."""


# ------------------------------------------------------------------ PRNG


@dataclass(frozen=True, slots=True)
class PrngState:
    """State of the 64-bit maximal-length Fibonacci LFSR."""

    state: int

    def __post_init__(self) -> None:
        if not 0 <= self.state <= MASK64:
            raise ValueError(f"LFSR state must fit in 64 bits, got {self.state:#x}")
        if self.state == 0:
            raise ZeroStateError("LFSR state must be nonzero")


def prng_next(s: PrngState) -> tuple[int, PrngState]:
    """Clock the LFSR 64 times; the fresh 64 bits are both output and new state."""
    word = kernels.lfsr_advance64(s.state)
    return word, PrngState(word)


def lfsr_step(state: int) -> int:
    """One clock of the LFSR (bit-serial form, kept for clarity and testing)."""
    fb = (state ^ (state >> 1) ^ (state >> 3) ^ (state >> 4)) & 1
    return (state >> 1) | (fb << 63)


_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


# domain separators so that mask, input and noise streams of one trace differ
DOMAIN_MASK = 0x6D61736B
DOMAIN_INPUT = 0x696E7075
DOMAIN_NOISE = 0x6E6F6973
DOMAIN_SHUFFLE = 0x73687566


def derive_state(master_seed: int, index: int = 0, domain: int = 0) -> PrngState:
    """Nonlinearly derive an independent LFSR seed from ``(master, index, domain)``.

    The LFSR is linear over GF(2), so seeding neighbouring streams with
    ``master ^ index`` would make them linearly related; a splitmix64 finaliser
    breaks that relation.
    """
    z = _splitmix64(_splitmix64((master_seed ^ domain) & MASK64) ^ (index & MASK64))
    return PrngState(z or _GOLDEN)


# ------------------------------------------------------------- operands


@dataclass(frozen=True, slots=True)
class MaskedOperand:
    """A hidden word as ``k`` masked shares with their ``(A, B)`` masks.

    ``domain_width`` is 8 for per-byte affine lanes, 32 or 64 otherwise. ``A``
    and ``B`` are 64-bit words; for lane-wise modes they hold one byte per lane.
    """

    meta: MaskMetadata
    shares: tuple[int, ...]
    masks: tuple[tuple[int, int], ...]
    domain_width: int

    def __post_init__(self) -> None:
        mode = self.meta.mask_mode
        if mode is MaskMode.NONE:
            raise ValueError("mode 00 operands are never masked")
        k = self.meta.mask_shares
        if len(self.shares) != k or len(self.masks) != k:
            raise ValueError(f"expected {k} shares and masks, got {len(self.shares)}/{len(self.masks)}")
        if mode is MaskMode.AFFINE:
            if self.domain_width != LANE_WIDTH:
                raise ValueError("affine masking works on 8-bit lanes")
        elif self.domain_width not in (32, 64):
            raise ValueError(f"unsupported domain width {self.domain_width}")

    @property
    def mode(self) -> MaskMode:
        return self.meta.mask_mode


def _has_zero_lane(a: int) -> bool:
    return any(((a >> sh) & 0xFF) == 0 for sh in range(0, 64, 8))


ROLE_SPLIT, ROLE_A, ROLE_B = 0, 1, 2
MAX_SHARES = 3


def mask_slot(operand: int, share: int, role: int) -> int:
    """Index of the bank LFSR feeding one mask word of one operand."""
    return (operand * MAX_SHARES + share) * 3 + role


class LfsrBank:
    """Independently seeded LFSRs, one per mask slot.

    A single 64-bit LFSR cannot supply the several mutually independent mask
    words one instruction needs (its successive outputs are linearly related),
    so the masking unit draws every (operand, share, role) word from its own
    register.
    """

    __slots__ = ("_seed", "_states")

    def __init__(self, seed: int) -> None:
        self._seed = seed
        self._states: dict[int, int] = {}

    def draw(self, slot: int) -> int:
        st = self._states.get(slot)
        if st is None:
            st = derive_state(self._seed, slot, DOMAIN_MASK).state
        st = kernels.lfsr_advance64(st)
        self._states[slot] = st
        return st


def _nonzero_lanes(draw, slot: int) -> int:
    """Sample a word whose eight bytes are all nonzero, by byte rejection."""
    a = 0
    filled = 0
    while filled < 8:
        w = draw(slot)
        for _ in range(8):
            b = w & 0xFF
            w >>= 8
            if b:
                a |= b << (8 * filled)
                filled += 1
                if filled == 8:
                    break
    return a


def _mask_raw(
    x: int, mode: MaskMode, k: int, width: int, draw, scheme: Scheme = "affine", operand: int = 0
) -> tuple[tuple[int, ...], tuple[tuple[int, int], ...]]:
    wmask = (1 << width) - 1 if mode is not MaskMode.AFFINE else MASK64
    # additive split into k parts
    parts = []
    acc = x
    for i in range(k - 1):
        r = draw(mask_slot(operand, i, ROLE_SPLIT)) & wmask
        parts.append(r)
        acc = (acc - r) & wmask if mode is MaskMode.ARITHMETIC else acc ^ r
    parts.append(acc)

    shares = []
    masks = []
    for i, p in enumerate(parts):
        if mode is MaskMode.AFFINE:
            a = _nonzero_lanes(draw, mask_slot(operand, i, ROLE_A))
            b = 0 if scheme == "multiplicative" else draw(mask_slot(operand, i, ROLE_B))
            shares.append(kernels.affine_fwd64(p, a, b))
        else:
            a, b = 1, draw(mask_slot(operand, i, ROLE_B)) & wmask
            shares.append((p + b) & wmask if mode is MaskMode.ARITHMETIC else p ^ b)
        masks.append((a, b))
    return tuple(shares), tuple(masks)


def _unmask_raw(mode: MaskMode, width: int, shares, masks) -> int:
    if mode is MaskMode.ARITHMETIC:
        wmask = (1 << width) - 1
        return sum(s - b for s, (_, b) in zip(shares, masks)) & wmask
    out = 0
    if mode is MaskMode.AFFINE:
        for s, (a, b) in zip(shares, masks):
            if _has_zero_lane(a):
                raise CorruptMaskError("affine multiplier has a zero lane")
            out ^= kernels.affine_inv64(s, a, b)
        return out
    for s, (_, b) in zip(shares, masks):
        out ^= s ^ b
    return out


class _Stream:
    # single-LFSR draw source for the functional API
    __slots__ = ("state",)

    def __init__(self, state: int) -> None:
        self.state = state

    def __call__(self, _slot: int) -> int:
        self.state = kernels.lfsr_advance64(self.state)
        return self.state


def default_width(mode: MaskMode) -> int:
    return LANE_WIDTH if mode is MaskMode.AFFINE else 64


def mask(
    x: int,
    meta: MaskMetadata,
    domain_width: int | None = None,
    rng: PrngState | None = None,
    *,
    scheme: Scheme = "affine",
) -> tuple[MaskedOperand, PrngState]:
    """Hide ``x`` under fresh masks; returns the operand and the advanced PRNG.

    ``scheme`` only matters for mode 10: ``"multiplicative"`` fixes ``B = 0``.
    """
    if rng is None:
        raise ValueError("a PRNG state is required")
    mode = meta.mask_mode
    if mode is MaskMode.NONE:
        raise ValueError("mode 00 must bypass the masking unit")
    width = default_width(mode) if domain_width is None else domain_width
    limit = 64 if mode is MaskMode.AFFINE else width
    if not 0 <= x < (1 << limit):
        raise ValueError(f"{x:#x} does not fit in the {limit}-bit masking domain")
    stream = _Stream(rng.state)
    shares, masks = _mask_raw(x, mode, meta.mask_shares, limit, stream, scheme)
    return MaskedOperand(meta, shares, masks, width), PrngState(stream.state)


def unmask(m: MaskedOperand) -> int:
    """Recover the hidden value exactly."""
    width = 64 if m.mode is MaskMode.AFFINE else m.domain_width
    return _unmask_raw(m.mode, width, m.shares, m.masks)


def remask(
    m: MaskedOperand, rng: PrngState, *, scheme: Scheme = "affine"
) -> tuple[MaskedOperand, PrngState]:
    """Re-randomise ``m`` with fresh masks, preserving the hidden value."""
    return mask(unmask(m), m.meta, m.domain_width, rng, scheme=scheme)


def affine_lane_roundtrip_failures() -> int:
    """Exhaustive check of all (x, A != 0, B) byte triples; 0 means no failure."""
    return kernels.affine_roundtrip_failures()
