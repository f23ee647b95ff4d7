"""Leakage assessment: fixed-vs-random Welch t-tests and correlation power analysis."""

from __future__ import annotations

import io
import json
import math
import sys
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from cryptrisc import kernels
from cryptrisc.crypto_isa import AES_SBOX, CryptoOp
from cryptrisc.fdl import MaskPolicy, classify
from cryptrisc.fields import MASK64
from cryptrisc.mcu import DOMAIN_INPUT, derive_state
from cryptrisc.power import (
    DEFAULT_REPEAT,
    LeakageConfig,
    Trace,
    format_float,
    instruction_window,
    simulate_window,
    synthesize_traces,
    traces_to_matrix,
)

TVLA_THRESHOLD = 4.5
INF_T = sys.float_info.max  # sentinel for zero-variance groups with distinct means
CPA_STEP = 250
CPA_ALPHA = 0.05
CPA_KEY = bytes.fromhex("2b7e151628aed2a6abf7158809cf4f3c")


# ------------------------------------------------------------------ TVLA


def welch_t(group_a, group_b) -> np.ndarray:
    """Per-sample Welch t statistic of ``group_a`` against ``group_b``.

    Sums use :func:`math.fsum` so results do not depend on summation order.
    Zero pooled variance gives 0 for equal means and ``+-INF_T`` otherwise.
    """
    a = np.asarray(group_a, dtype=float)
    b = np.asarray(group_b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise ValueError("each group needs at least two traces")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"trace length mismatch: {a.shape[1]} vs {b.shape[1]}")
    na, nb = a.shape[0], b.shape[0]
    out = np.empty(a.shape[1])
    for j in range(a.shape[1]):
        ca, cb = a[:, j].tolist(), b[:, j].tolist()
        ma = math.fsum(ca) / na
        mb = math.fsum(cb) / nb
        va = math.fsum((x - ma) ** 2 for x in ca) / (na - 1)
        vb = math.fsum((x - mb) ** 2 for x in cb) / (nb - 1)
        den = math.sqrt(va / na + vb / nb)
        if den == 0.0:
            out[j] = 0.0 if ma == mb else math.copysign(INF_T, ma - mb)
        else:
            out[j] = (ma - mb) / den
    return out


@dataclass
class TvlaReport:
    t_values: list[float]
    max_abs_t: float
    n_traces: int
    seed: int
    threshold: float = TVLA_THRESHOLD
    config: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.max_abs_t < self.threshold else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "t_values": self.t_values,
            "max_abs_t": self.max_abs_t,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "n_traces": self.n_traces,
            "seed": self.seed,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def write_t_csv(t_values: Sequence[float], fh: io.TextIOBase) -> None:
    fh.write("sample_index,t_value\n")
    for j, t in enumerate(t_values):
        fh.write(f"{j},{format_float(t)}\n")


def tvla_from_traces(traces: Sequence[Trace], seed: int, config: dict | None = None) -> TvlaReport:
    samples, groups = traces_to_matrix(traces)
    t = welch_t(samples[groups == 0], samples[groups == 1])
    return TvlaReport(
        t_values=[float(v) for v in t],
        max_abs_t=float(np.max(np.abs(t))),
        n_traces=len(traces),
        seed=seed,
        config=dict(config or {}),
    )


def tvla_campaign(
    op: CryptoOp,
    n_traces: int,
    masking: bool,
    cfg: LeakageConfig,
    seed: int,
    *,
    shares: int | MaskPolicy = 1,
    fixed_input: tuple[int, int] | None = None,
    imm: int | None = None,
    repeat: int = DEFAULT_REPEAT,
) -> TvlaReport:
    """Synthesize a fixed-vs-random campaign for ``op`` and test it at +-4.5."""
    traces = synthesize_traces(
        op, fixed_input, n_traces, masking, cfg, seed, shares=shares, imm=imm, repeat=repeat
    )
    config = {
        "instruction": op.value,
        "masking": masking,
        "sigma": cfg.sigma,
        "model": cfg.model,
        "shares": _shares_echo(op, shares) if masking else 0,
        "repeat": repeat,
    }
    return tvla_from_traces(traces, seed, config)


def _shares_echo(op: CryptoOp, shares: int | MaskPolicy) -> int:
    if isinstance(shares, int):
        return shares
    return shares.shares_for(classify(op))


# ------------------------------------------------------------------- CPA


def hw_sbox_hypothesis(plaintext: np.ndarray) -> np.ndarray:
    """``HW(SBOX[p ^ g])`` for every guess ``g``; shape (256, n)."""
    sbox_hw = np.array([kernels.popcount64(v) for v in AES_SBOX], dtype=float)
    guesses = np.arange(256)[:, None]
    return sbox_hw[np.bitwise_xor(plaintext[None, :].astype(int), guesses)]


def pearson_matrix(hyp: np.ndarray, traces: np.ndarray) -> np.ndarray:
    """Correlation of each hypothesis row with each trace column; constant columns give 0."""
    hc = hyp - hyp.mean(axis=1, keepdims=True)
    tc = traces - traces.mean(axis=0, keepdims=True)
    num = hc @ tc
    den = np.sqrt(np.sum(hc * hc, axis=1))[:, None] * np.sqrt(np.sum(tc * tc, axis=0))[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return np.clip(r, -1.0, 1.0)


def fisher_p_value(r: float, n: int) -> float:
    """Two-sided p-value of a correlation under the Fisher z normal approximation."""
    if n <= 3:
        return 1.0
    r = min(abs(r), 1.0 - 1e-16)
    z = math.atanh(r) * math.sqrt(n - 3)
    return math.erfc(z / math.sqrt(2.0))


def _rank(scores: np.ndarray, key: int) -> int:
    s = scores[key]
    better = np.sum(scores > s) + np.sum(scores[:key] == s)
    return int(better) + 1


@dataclass
class CpaReport:
    max_abs_r: list[float]
    best_guess: int
    p_value: float
    n_traces: int
    seed: int
    true_key: int | None = None
    true_key_rank: int | None = None
    true_key_p_value: float | None = None
    min_traces_to_rank1: int | None = None
    config: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        """``pass`` when the true key's correlation is not significant."""
        p = self.true_key_p_value if self.true_key_p_value is not None else self.p_value
        return "pass" if p > CPA_ALPHA else "fail"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def cpa(
    traces,
    inputs,
    true_key: int | None = None,
    hypothesis: Callable[[np.ndarray], np.ndarray] = hw_sbox_hypothesis,
    *,
    step: int = CPA_STEP,
    seed: int = 0,
    config: dict | None = None,
) -> CpaReport:
    """Rank the 256 key-byte guesses by peak absolute correlation."""
    t = np.asarray(traces, dtype=float)
    if t.ndim == 1:
        t = t[:, None]
    p = np.asarray(inputs)
    n = t.shape[0]
    if n < 4:
        raise ValueError(f"CPA needs at least 4 traces, got {n}")
    if p.shape[0] != n:
        raise ValueError("traces and inputs are not aligned")
    hyp = hypothesis(p)
    n_guess, n_samples = hyp.shape[0], t.shape[1]

    def scores_for(m: int) -> np.ndarray:
        return np.max(np.abs(pearson_matrix(hyp[:, :m], t[:m])), axis=1)

    scores = scores_for(n)
    best = int(np.argmax(scores))  # first maximum: ties go to the lowest guess
    p_best = min(1.0, fisher_p_value(scores[best], n) * n_guess * n_samples)
    report = CpaReport(
        max_abs_r=[float(v) for v in scores],
        best_guess=best,
        p_value=p_best,
        n_traces=n,
        seed=seed,
        config=dict(config or {}),
    )
    if true_key is not None:
        report.true_key = true_key
        report.true_key_rank = _rank(scores, true_key)
        report.true_key_p_value = min(1.0, fisher_p_value(scores[true_key], n) * n_samples)
        report.min_traces_to_rank1 = _min_traces(scores_for, n, true_key, step)
    return report


def _min_traces(scores_for, n: int, key: int, step: int) -> int | None:
    prefixes = list(range(step, n, step)) + [n]
    ranks = [_rank(scores_for(m), key) if m >= 4 else 0 for m in prefixes]
    if ranks[-1] != 1:
        return None
    first = len(prefixes) - 1
    while first > 0 and ranks[first - 1] == 1:
        first -= 1
    return prefixes[first]


def cpa_traces(
    n_traces: int,
    masking: bool,
    cfg: LeakageConfig,
    seed: int,
    key: bytes = CPA_KEY,
    repeat: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Traces of ``saes64.encs`` on ``pt ^ key`` with random plaintexts."""
    window = instruction_window(CryptoOp.AES64_ENCS, repeat=repeat)
    k_lo = int.from_bytes(key[:8], "little")
    k_hi = int.from_bytes(key[8:16], "little")
    rows = []
    pt0 = np.empty(n_traces, dtype=np.uint8)
    for i in range(n_traces):
        trace_seed = (seed ^ i) & MASK64
        st = derive_state(trace_seed, 0, DOMAIN_INPUT).state
        lo = kernels.lfsr_advance64(st)
        hi = kernels.lfsr_advance64(lo)
        pt0[i] = lo & 0xFF
        rows.append(simulate_window(window, lo ^ k_lo, hi ^ k_hi, masking, cfg, trace_seed))
    return np.vstack(rows) if rows else np.empty((0, len(window))), pt0


def cpa_campaign(
    n_traces: int,
    masking: bool,
    cfg: LeakageConfig,
    seed: int,
    key: bytes = CPA_KEY,
) -> CpaReport:
    """Attack key byte 0 through the first-round S-box output of ``saes64.encs``."""
    if n_traces < 4:
        raise ValueError(f"CPA needs at least 4 traces, got {n_traces}")
    traces, pt0 = cpa_traces(n_traces, masking, cfg, seed, key)
    config = {"instruction": CryptoOp.AES64_ENCS.value, "masking": masking, "sigma": cfg.sigma, "model": cfg.model}
    return cpa(traces, pt0, true_key=key[0], seed=seed, config=config)
