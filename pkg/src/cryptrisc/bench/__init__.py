"""Benchmark registry, runner and speedup reporting."""

from __future__ import annotations

import csv
import hashlib
import io
import random
from collections.abc import Callable
from dataclasses import dataclass
from functools import cache
from typing import Any

from cryptrisc.bench import programs as P
from cryptrisc.crypto_isa import ZBKB_OPS, CryptoOp
from cryptrisc.pipeline import ExecStats, Program, run
from cryptrisc.reference import aes_encrypt_block, md_pad, sha256, sha512, sm3, sm4_encrypt_block

__all__ = [
    "BENCHMARKS",
    "Benchmark",
    "SpeedupResult",
    "get_benchmark",
    "run_benchmark",
    "speedup",
    "speedup_table",
    "write_csv",
]


@dataclass(frozen=True)
class Benchmark:
    """One algorithm in baseline and accelerated form plus its oracle."""

    name: str
    build_baseline: Callable[[], Program]
    build_accelerated: Callable[[], Program]
    encode: Callable[[Any], dict[int, bytes]]
    decode: Callable[[bytes], bytes]
    oracle: Callable[[Any], bytes]
    random_input: Callable[[random.Random], Any]
    vector: Any

    @property
    def baseline_program(self) -> Program:
        return _cached_program(self.name, False)

    @property
    def accelerated_program(self) -> Program:
        return _cached_program(self.name, True)

    def program(self, accelerated: bool) -> Program:
        return _cached_program(self.name, accelerated)


@dataclass(frozen=True, slots=True)
class SpeedupResult:
    benchmark: str
    baseline_cycles: int
    accelerated_cycles: int

    @property
    def speedup(self) -> float:
        return self.baseline_cycles / self.accelerated_cycles


def _block_cipher_input(key_len: int):
    def gen(rng: random.Random) -> tuple[bytes, bytes]:
        return rng.randbytes(key_len), rng.randbytes(16)

    return gen


def _message_input(max_len: int):
    def gen(rng: random.Random) -> bytes:
        return rng.randbytes(rng.randint(0, max_len))

    return gen


def _aes_encode(inp: tuple[bytes, bytes]) -> dict[int, bytes]:
    key, block = inp
    return {P.KEY: key, P.IN: block}


def _sm4_encode(inp: tuple[bytes, bytes]) -> dict[int, bytes]:
    key, block = inp
    return {P.KEY: P.be_words_to_le_image(key), P.IN: P.be_words_to_le_image(block)}


def _hash_encode(block_bytes: int, length_bytes: int, width: int):
    def encode(message: bytes) -> dict[int, bytes]:
        padded = md_pad(message, block_bytes, length_bytes)
        if len(padded) != block_bytes:
            raise ValueError(f"message of {len(message)} bytes does not fit one block")
        return {P.W: P.be_words_to_le_image(padded, width)}

    return encode


def _identity(out: bytes) -> bytes:
    return out


def _aes(key_bytes: int, vector_key: str, vector_pt: str) -> Benchmark:
    return Benchmark(
        name=f"aes{key_bytes * 8}",
        build_baseline=lambda: P.aes_baseline(key_bytes),
        build_accelerated=lambda: P.aes_accelerated(key_bytes),
        encode=_aes_encode,
        decode=_identity,
        oracle=lambda inp: aes_encrypt_block(*inp),
        random_input=_block_cipher_input(key_bytes),
        vector=(bytes.fromhex(vector_key), bytes.fromhex(vector_pt)),
    )


_FIPS_PT = "00112233445566778899aabbccddeeff"

BENCHMARKS: dict[str, Benchmark] = {
    b.name: b
    for b in (
        _aes(16, "000102030405060708090a0b0c0d0e0f", _FIPS_PT),
        _aes(24, "000102030405060708090a0b0c0d0e0f1011121314151617", _FIPS_PT),
        _aes(32, "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f", _FIPS_PT),
        Benchmark(
            "sha256",
            lambda: P.sha256_program(False),
            lambda: P.sha256_program(True),
            _hash_encode(64, 8, 4),
            lambda out: P.le_image_to_be_words(out, 4),
            sha256,
            _message_input(55),
            b"abc",
        ),
        Benchmark(
            "sha512",
            lambda: P.sha512_program(False),
            lambda: P.sha512_program(True),
            _hash_encode(128, 16, 8),
            lambda out: P.le_image_to_be_words(out, 8),
            sha512,
            _message_input(111),
            b"abc",
        ),
        Benchmark(
            "sm3",
            lambda: P.sm3_program(False),
            lambda: P.sm3_program(True),
            _hash_encode(64, 8, 4),
            lambda out: P.le_image_to_be_words(out, 4),
            sm3,
            _message_input(55),
            b"abc",
        ),
        Benchmark(
            "sm4",
            lambda: P.sm4_program(False),
            lambda: P.sm4_program(True),
            _sm4_encode,
            lambda out: P.le_image_to_be_words(out, 4),
            lambda inp: sm4_encrypt_block(*inp),
            _block_cipher_input(16),
            (
                bytes.fromhex("0123456789abcdeffedcba9876543210"),
                bytes.fromhex("0123456789abcdeffedcba9876543210"),
            ),
        ),
    )
}


def get_benchmark(name: str) -> Benchmark:
    try:
        return BENCHMARKS[name.lower()]
    except KeyError:
        known = ", ".join(BENCHMARKS)
        raise KeyError(f"unknown benchmark {name!r}; choose from {known}") from None


@cache
def _cached_program(name: str, accelerated: bool) -> Program:
    b = BENCHMARKS[name]
    prog = b.build_accelerated() if accelerated else b.build_baseline()
    if not accelerated:
        illegal = {i.op for i in prog.instructions if isinstance(i.op, CryptoOp) or i.op in ZBKB_OPS}
        if illegal:
            raise AssertionError(f"baseline {name} uses extension ops: {sorted(map(str, illegal))}")
    return prog


def run_benchmark(
    b: Benchmark,
    inp: Any,
    masking: bool = False,
    seed: int = 1,
    *,
    accelerated: bool = True,
) -> tuple[bytes, ExecStats]:
    """Run one variant of ``b`` on ``inp``; returns the decoded output and stats."""
    memory = dict(P.CONST_DATA)
    memory.update(b.encode(inp))
    raw, stats, _ = run(b.program(accelerated), memory, masking=masking, seed=seed)
    return b.decode(raw), stats


def speedup(b: Benchmark, inp: Any = None, masking: bool = False, seed: int = 1) -> SpeedupResult:
    """Baseline over accelerated cycle count for one input (the vector by default)."""
    inp = b.vector if inp is None else inp
    _, base = run_benchmark(b, inp, masking, seed, accelerated=False)
    _, acc = run_benchmark(b, inp, masking, seed, accelerated=True)
    return SpeedupResult(b.name, base.cycles, acc.cycles)


BENCH_CSV_HEADER = ("benchmark", "baseline_cycles", "accel_cycles", "speedup", "masking", "output_hash")


def speedup_table(names: list[str] | None = None, masking: bool = False, seed: int = 1) -> list[dict]:
    rows = []
    for name in names or list(BENCHMARKS):
        b = get_benchmark(name)
        out_base, base = run_benchmark(b, b.vector, masking, seed, accelerated=False)
        out_acc, acc = run_benchmark(b, b.vector, masking, seed, accelerated=True)
        if out_base != out_acc:
            raise AssertionError(f"{name}: baseline and accelerated outputs differ")
        rows.append(
            {
                "benchmark": b.name,
                "baseline_cycles": base.cycles,
                "accel_cycles": acc.cycles,
                "speedup": f"{base.cycles / acc.cycles:.4f}",
                "masking": "on" if masking else "off",
                "output_hash": hashlib.sha256(out_acc).hexdigest()[:16],
            }
        )
    return rows


def write_csv(rows: list[dict], fh: io.TextIOBase | None = None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=BENCH_CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text
