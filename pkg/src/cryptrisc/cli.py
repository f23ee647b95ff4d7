"""Command-line campaign runner: ``cryptrisc <command> ...``."""

from __future__ import annotations

import argparse
import random
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from cryptrisc import crypto_isa, fields, kernels, mcu
from cryptrisc.bench import BENCHMARKS, get_benchmark, run_benchmark, speedup_table, write_csv
from cryptrisc.crypto_isa import CryptoOp, IllegalInstruction, parse_opcode
from cryptrisc.fdl import POLICY_ENV, MaskMetadata, MaskMode, MaskPolicy, classify
from cryptrisc.power import LeakageConfig, synthesize_traces, write_traces_csv
from cryptrisc.sca import cpa_campaign, tvla_from_traces, write_t_csv

# published known-answer results for each benchmark's standard input
KNOWN_ANSWERS: dict[str, str] = {
    "aes128": "69c4e0d86a7b0430d8cdb78070b4c55a",
    "aes192": "dda97ca4864cdfe06eaf70a0ec0d7191",
    "aes256": "8ea2b7ca516745bfeafc49904b496089",
    "sha256": "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad",
    "sha512": (
        "ddaf35a193617abacc417349ae20413112e6fa4e89a97ea20a9eeee64b55d39a"
        "2192992a274fc1a836ba3c23a3feebbd454d4423643ce80e2a9ac94fa54ca49f"
    ),
    "sm3": "66c7f0f462eeedd9d1f2d46bdc10e4e24167c4875cf2f7a2297da02b8f4ba8e0",
    "sm4": "681edf34d206965e86b3e94f536e4246",
}

LFSR_GOLDEN_SEED1 = 0xB000000000000001


class CliError(Exception):
    pass


def _describe_input(inp) -> str:
    if isinstance(inp, tuple):
        return f"key={inp[0].hex()} pt={inp[1].hex()}"
    return f"msg={inp!r}"


# ---------------------------------------------------------------- selftest


def _check_benchmark(name: str) -> Callable[[], None]:
    def check() -> None:
        b = BENCHMARKS[name]
        expected = bytes.fromhex(KNOWN_ANSWERS[name])
        if b.oracle(b.vector) != expected:
            raise AssertionError(f"reference oracle disagrees with the published vector ({_describe_input(b.vector)})")
        for accelerated in (False, True):
            out, _ = run_benchmark(b, b.vector, accelerated=accelerated)
            if out != expected:
                variant = "accelerated" if accelerated else "baseline"
                raise AssertionError(
                    f"{variant} vector {_describe_input(b.vector)}: got {out.hex()}, expected {expected.hex()}"
                )
        masked, _ = run_benchmark(b, b.vector, masking=True, accelerated=True)
        if masked != expected:
            raise AssertionError(f"masked run of vector {_describe_input(b.vector)} gave {masked.hex()}")

    return check


def _check_compositions() -> None:
    key, pt = BENCHMARKS["aes128"].vector
    ct = crypto_isa.compose_aes128(key, pt)
    if ct.hex() != KNOWN_ANSWERS["aes128"]:
        raise AssertionError(f"compose_aes128 vector: got {ct.hex()}")
    if crypto_isa.compose_aes_decrypt(key, ct) != pt:
        raise AssertionError("AES decryption composition does not invert encryption")
    if crypto_isa.compose_sha256(b"abc").hex() != KNOWN_ANSWERS["sha256"]:
        raise AssertionError("compose_sha256('abc') mismatch")
    if crypto_isa.compose_sha512(b"abc").hex() != KNOWN_ANSWERS["sha512"]:
        raise AssertionError("compose_sha512('abc') mismatch")
    if crypto_isa.compose_sm3(b"abc").hex() != KNOWN_ANSWERS["sm3"]:
        raise AssertionError("compose_sm3('abc') mismatch")
    k, p = BENCHMARKS["sm4"].vector
    if crypto_isa.compose_sm4(k, p).hex() != KNOWN_ANSWERS["sm4"]:
        raise AssertionError("compose_sm4 vector mismatch")


def _check_fields() -> None:
    if fields.gf_mul(0x57, 0x83) != 0xC1:
        raise AssertionError("gf_mul(0x57, 0x83) != 0xc1")
    for a in range(1, 256):
        if fields.gf_mul(a, fields.gf_inv(a)) != 1:
            raise AssertionError(f"gf_inv({a:#04x}) is not an inverse")


def _check_prng() -> None:
    word, _ = mcu.prng_next(mcu.PrngState(1))
    if word != LFSR_GOLDEN_SEED1:
        raise AssertionError(f"LFSR golden output mismatch: {word:#018x}")


def _check_mask_roundtrip() -> None:
    rng = random.Random(2024)
    st = mcu.PrngState(0x1234_5678_9ABC_DEF1)
    cases = [
        (MaskMode.BOOLEAN, 64, "affine"),
        (MaskMode.BOOLEAN, 32, "affine"),
        (MaskMode.ARITHMETIC, 32, "affine"),
        (MaskMode.ARITHMETIC, 64, "affine"),
        (MaskMode.AFFINE, 8, "affine"),
        (MaskMode.AFFINE, 8, "multiplicative"),
    ]
    for mode, width, scheme in cases:
        for k in (1, 2, 3):
            meta = MaskMetadata(mode, k)
            for _ in range(200):
                x = rng.getrandbits(64 if mode is MaskMode.AFFINE else width)
                m, st = mcu.mask(x, meta, width, st, scheme=scheme)
                if mcu.unmask(m) != x:
                    raise AssertionError(f"round trip failed: mode={mode} k={k} x={x:#x}")


def _check_lane_exhaustive() -> None:
    failures = mcu.affine_lane_roundtrip_failures()
    if failures:
        raise AssertionError(f"{failures} affine lane round-trip failures")


def selftest_checks() -> list[tuple[str, Callable[[], None]]]:
    checks = [(name, _check_benchmark(name)) for name in BENCHMARKS]
    checks += [
        ("compositions", _check_compositions),
        ("fields", _check_fields),
        ("prng", _check_prng),
        ("mask-roundtrip", _check_mask_roundtrip),
        ("affine-lanes-exhaustive", _check_lane_exhaustive),
    ]
    return checks


def cmd_selftest(args: argparse.Namespace) -> int:
    failed = []
    for name, check in selftest_checks():
        try:
            check()
        except Exception as exc:  # every failure is reported, none aborts the run
            failed.append(name)
            print(f"FAIL {name}: {exc}")
        else:
            print(f"PASS {name}")
    print(f"backend: {kernels.BACKEND}")
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return 1
    print("all checks passed")
    return 0


# ------------------------------------------------------------------ bench


def cmd_bench(args: argparse.Namespace) -> int:
    if args.all or args.name is None:
        names = list(BENCHMARKS)
    else:
        names = [get_benchmark(args.name).name]
    rows = speedup_table(names, masking=args.masking == "on", seed=args.seed)
    text = write_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


# ------------------------------------------------------------------- tvla


def _policy(args: argparse.Namespace) -> int | MaskPolicy:
    if args.shares is not None:
        return args.shares
    return MaskPolicy.from_env()


def cmd_tvla(args: argparse.Namespace) -> int:
    if args.list:
        for op in CryptoOp:
            print(op.value)
        return 0
    if args.instr is None:
        raise CliError("tvla needs an instruction name (or --list)")
    if args.seed is None:
        raise CliError("--seed is required for reproducible campaigns")
    op = parse_opcode(args.instr)
    if not isinstance(op, CryptoOp):
        raise CliError(f"{args.instr} is not a crypto instruction")
    cfg = LeakageConfig(args.sigma, args.model)
    shares = _policy(args)
    traces = synthesize_traces(op, None, args.n, args.masked, cfg, args.seed, shares=shares, imm=args.imm)
    config = {
        "instruction": op.value,
        "masking": args.masked,
        "sigma": args.sigma,
        "model": args.model,
        "shares": (shares if isinstance(shares, int) else shares.shares_for(classify(op))) if args.masked else 0,
    }
    report = tvla_from_traces(traces, args.seed, config)
    print(report.to_json())
    if args.json_out:
        Path(args.json_out).write_text(report.to_json() + "\n")
    if args.csv_out:
        with open(args.csv_out, "w") as fh:
            write_t_csv(report.t_values, fh)
    if args.traces_out:
        with open(args.traces_out, "w") as fh:
            write_traces_csv(traces, fh)
    return 0


# -------------------------------------------------------------------- cpa


def cmd_cpa(args: argparse.Namespace) -> int:
    if args.seed is None:
        raise CliError("--seed is required for reproducible campaigns")
    if args.n < 4:
        raise CliError(f"CPA needs at least 4 traces, got --n {args.n}")
    report = cpa_campaign(args.n, args.masked, LeakageConfig(args.sigma, args.model), args.seed)
    print(report.to_json())
    if args.json_out:
        Path(args.json_out).write_text(report.to_json() + "\n")
    return 0


# ---------------------------------------------------------------- vectors


def cmd_vectors(args: argparse.Namespace) -> int:
    print("benchmark,input,expected")
    for name, b in BENCHMARKS.items():
        print(f"{name},{_describe_input(b.vector)},{KNOWN_ANSWERS[name]}")
    return 0


# ----------------------------------------------------------------- parser


def _add_masking(p: argparse.ArgumentParser, default: bool) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--masked", dest="masked", action="store_true", default=default)
    g.add_argument("--unmasked", dest="masked", action="store_false")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cryptrisc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("selftest", help="run known-answer and masking checks")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("bench", help="baseline vs accelerated cycle counts (CSV)")
    p.add_argument("name", nargs="?", help="benchmark name; omit or use --all for every benchmark")
    p.add_argument("--all", action="store_true")
    p.add_argument("--masking", choices=("on", "off"), default="off")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", help="also write the CSV here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("tvla", help="fixed-vs-random Welch t-test campaign")
    p.add_argument("instr", nargs="?")
    p.add_argument("--list", action="store_true", help="list the crypto instructions and exit")
    _add_masking(p, default=True)
    p.add_argument("--n", type=int, default=4000)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--shares", type=int, choices=(1, 2, 3))
    p.add_argument("--model", choices=("hw", "hw+hd"), default="hw+hd")
    p.add_argument("--imm", type=int, help="immediate for ks1 / ssm4 instructions")
    p.add_argument("--json-out")
    p.add_argument("--csv-out", help="per-sample t-values (sample_index,t_value)")
    p.add_argument("--traces-out", help="dump every trace as CSV")
    p.set_defaults(func=cmd_tvla)

    p = sub.add_parser("cpa", help="correlation power analysis on the AES S-box path")
    _add_masking(p, default=False)
    p.add_argument("--n", type=int, default=6000)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--seed", type=int)
    p.add_argument("--model", choices=("hw", "hw+hd"), default="hw+hd")
    p.add_argument("--json-out")
    p.set_defaults(func=cmd_cpa)

    p = sub.add_parser("vectors", help="print the known-answer table")
    p.set_defaults(func=cmd_vectors)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, KeyError, ValueError, IllegalInstruction, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"cryptrisc {args.command}: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["main", "build_parser", "KNOWN_ANSWERS", "POLICY_ENV"]
