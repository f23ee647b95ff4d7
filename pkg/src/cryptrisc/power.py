"""Synthetic power traces from pipeline bus activity.

Each EX-stage event leaks ``HW(op1) + HW(op2) + HW(result)`` (plus any extra
shares), optionally ``HD(prev_rd, result)``, plus Gaussian noise. Noise comes
from Box-Muller over two independent LFSR streams: one feeds the radius
uniforms, the other the angle uniforms. A 64-bit word ``w`` maps to the uniform
``((w >> 11) + 1) * 2**-53`` in (0, 1].
"""

from __future__ import annotations

import io
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cache
from typing import Literal

import numpy as np

from cryptrisc import kernels
from cryptrisc.crypto_isa import UNARY_CRYPTO, WORD32_CRYPTO, CryptoOp, Instruction, IMM_RANGES
from cryptrisc.fdl import FieldDetectionLayer, MaskPolicy
from cryptrisc.fields import MASK32, MASK64
from cryptrisc.mcu import DOMAIN_INPUT, DOMAIN_MASK, DOMAIN_NOISE, DOMAIN_SHUFFLE, derive_state
from cryptrisc.pipeline import Machine, MachineState, PowerEvent

FIXED, RANDOM = 0, 1
DEFAULT_REPEAT = 4
# canonical fixed operands: the FIPS-197 example plaintext as two words
FIXED_OPERANDS = (0x7766554433221100, 0xFFEEDDCCBBAA9988)

_TWO_PI = 2.0 * math.pi
_U53 = 2.0**-53

Model = Literal["hw", "hw+hd"]


@dataclass(frozen=True, slots=True)
class LeakageConfig:
    sigma: float = 1.0
    model: Model = "hw+hd"
    noise_seed: int = 0

    def __post_init__(self) -> None:
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be non-negative, got {self.sigma}")
        if self.model not in ("hw", "hw+hd"):
            raise ValueError(f"unknown leakage model {self.model!r}")


def word_to_unit(w: int) -> float:
    """Map a 64-bit word to a uniform double in (0, 1]."""
    return ((w >> 11) + 1) * _U53


class NoiseStream:
    """Standard-normal variates from two seeded LFSR streams via Box-Muller."""

    __slots__ = ("_r", "_theta", "_spare")

    def __init__(self, seed: int, index: int = 0) -> None:
        self._r = derive_state(seed, index, DOMAIN_NOISE).state
        self._theta = derive_state(seed, index, DOMAIN_NOISE ^ 0xFF).state
        self._spare: float | None = None

    def gauss(self) -> float:
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        self._r = kernels.lfsr_advance64(self._r)
        self._theta = kernels.lfsr_advance64(self._theta)
        radius = math.sqrt(-2.0 * math.log(word_to_unit(self._r)))
        angle = _TWO_PI * word_to_unit(self._theta)
        self._spare = radius * math.sin(angle)
        return radius * math.cos(angle)


def leak(event: PowerEvent, cfg: LeakageConfig, noise: NoiseStream | None = None) -> float:
    """Leakage sample for one event."""
    pc = kernels.popcount64
    value = pc(event.op1) + pc(event.op2) + pc(event.result)
    for share in event.aux:
        value += pc(share)
    if cfg.model == "hw+hd":
        value += pc(event.prev_rd ^ event.result)
    value = float(value)
    if cfg.sigma > 0.0:
        if noise is None:
            raise ValueError("a noise stream is required when sigma > 0")
        value += cfg.sigma * noise.gauss()
    return value


@dataclass(frozen=True, slots=True)
class Trace:
    group: int
    samples: np.ndarray = field(repr=False)
    seed: int


@cache
def _fdl_cached(shares: tuple) -> FieldDetectionLayer:
    return FieldDetectionLayer(policy=MaskPolicy(dict(shares)))


def _fdl(shares: int | MaskPolicy) -> FieldDetectionLayer:
    policy = MaskPolicy.uniform(shares) if isinstance(shares, int) else shares
    return _fdl_cached(tuple(sorted(policy.shares.items())))


def default_imm(op: CryptoOp) -> int | None:
    legal = IMM_RANGES.get(op)
    return None if legal is None else legal.start


def operand_mask(op: CryptoOp) -> int:
    return MASK32 if op in WORD32_CRYPTO else MASK64


def instruction_window(op: CryptoOp, imm: int | None = None, repeat: int = DEFAULT_REPEAT) -> tuple[Instruction, ...]:
    """``repeat`` copies of ``op x3, x1, x2`` (the instrumented window)."""
    if imm is None:
        imm = default_imm(op)
    rs2 = 0 if op in UNARY_CRYPTO else 2
    ins = Instruction(op, 3, 1, rs2, imm)
    return (ins,) * repeat


def simulate_window(
    window: Sequence[Instruction],
    rs1: int,
    rs2: int,
    masking: bool,
    cfg: LeakageConfig,
    trace_seed: int,
    shares: int | MaskPolicy = 1,
) -> np.ndarray:
    """Noisy leakage samples of one execution of ``window``.

    ``shares`` is a uniform share count or a full per-tag policy.
    """
    state = MachineState(masking_enabled=masking, prng=derive_state(trace_seed, 0, DOMAIN_MASK))
    state.regs[1] = rs1 & MASK64
    state.regs[2] = rs2 & MASK64
    machine = Machine(state, _fdl(shares))
    noise = NoiseStream(cfg.noise_seed ^ trace_seed) if cfg.sigma > 0 else None
    out = np.empty(len(window))
    for j in range(len(window)):
        out[j] = leak(machine.step(window), cfg, noise)
    return out


def shuffled_groups(n_traces: int, master_seed: int) -> list[int]:
    """Half FIXED, half RANDOM labels in a seeded Fisher-Yates order."""
    if n_traces < 0 or n_traces % 2:
        raise ValueError(f"n_traces must be a non-negative even number, got {n_traces}")
    labels = [FIXED] * (n_traces // 2) + [RANDOM] * (n_traces // 2)
    st = derive_state(master_seed, 0, DOMAIN_SHUFFLE).state
    for i in range(n_traces - 1, 0, -1):
        st = kernels.lfsr_advance64(st)
        j = (st * (i + 1)) >> 64
        labels[i], labels[j] = labels[j], labels[i]
    return labels


def random_operands(trace_seed: int, op: CryptoOp) -> tuple[int, int]:
    st = derive_state(trace_seed, 0, DOMAIN_INPUT).state
    a = kernels.lfsr_advance64(st)
    b = kernels.lfsr_advance64(a)
    m = operand_mask(op)
    return a & m, (0 if op in UNARY_CRYPTO else b & m)


def synthesize_traces(
    op: CryptoOp,
    fixed_input: tuple[int, int] | None,
    n_traces: int,
    masking: bool,
    cfg: LeakageConfig,
    master_seed: int,
    *,
    shares: int | MaskPolicy = 1,
    imm: int | None = None,
    repeat: int = DEFAULT_REPEAT,
) -> list[Trace]:
    """Fixed-vs-random trace set for one instruction, ordered by trace index.

    Trace ``i`` uses seed ``master_seed ^ i``; its mask, input and noise streams
    are derived from that seed in separate domains.
    """
    window = instruction_window(op, imm, repeat)
    if fixed_input is None:
        fixed_input = FIXED_OPERANDS
    m = operand_mask(op)
    fixed = (fixed_input[0] & m, 0 if op in UNARY_CRYPTO else fixed_input[1] & m)
    traces = []
    for i, group in enumerate(shuffled_groups(n_traces, master_seed)):
        seed = (master_seed ^ i) & MASK64
        rs1, rs2 = fixed if group == FIXED else random_operands(seed, op)
        samples = simulate_window(window, rs1, rs2, masking, cfg, seed, shares)
        traces.append(Trace(group, samples, seed))
    return traces


def traces_to_matrix(traces: Iterable[Trace]) -> tuple[np.ndarray, np.ndarray]:
    """Stack traces into ``(samples, groups)`` arrays."""
    traces = list(traces)
    if not traces:
        return np.empty((0, 0)), np.empty(0, dtype=int)
    lengths = {len(t.samples) for t in traces}
    if len(lengths) != 1:
        raise ValueError("traces in one campaign must have equal length")
    return np.vstack([t.samples for t in traces]), np.array([t.group for t in traces])


def format_float(x: float) -> str:
    return f"{x:.9g}"


def write_traces_csv(traces: Sequence[Trace], fh: io.TextIOBase) -> None:
    length = len(traces[0].samples) if traces else 0
    fh.write(",".join(["group", "seed"] + [f"s{j}" for j in range(length)]) + "\n")
    for t in traces:
        fh.write(",".join([str(t.group), str(t.seed)] + [format_float(v) for v in t.samples]) + "\n")
