"""Compare the compiled kernels against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Reports per-call kernel timings for both backends, then the wall time of one
masked TVLA campaign and one benchmark sweep with each backend selected via
``CRYPTRISC_BACKEND``.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

from cryptrisc import _kernels_py
from cryptrisc.crypto_isa import AES_SBOX

try:
    from cryptrisc import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None

CALLS = {
    "lfsr_advance64": ("impl.lfsr_advance64(0x0123456789ABCDEF)", {}),
    "affine_fwd64": ("impl.affine_fwd64(0x0123456789ABCDEF, 0x0102030405060708, 0x55AA55AA55AA55AA)", {}),
    "affine_inv64": ("impl.affine_inv64(0x0123456789ABCDEF, 0x0102030405060708, 0x55AA55AA55AA55AA)", {}),
    "sub_bytes64": ("impl.sub_bytes64(0x0123456789ABCDEF, sbox)", {"sbox": AES_SBOX}),
    "popcount64": ("impl.popcount64(0x0123456789ABCDEF)", {}),
}

WORKLOAD = (
    "import time\n"
    "from cryptrisc import kernels\n"
    "from cryptrisc.crypto_isa import CryptoOp\n"
    "from cryptrisc.power import LeakageConfig\n"
    "from cryptrisc.sca import tvla_campaign\n"
    "from cryptrisc.bench import speedup_table\n"
    "t = time.perf_counter(); tvla_campaign(CryptoOp.AES64_ENCS, 1000, True, LeakageConfig(), 1)\n"
    "a = time.perf_counter() - t\n"
    "t = time.perf_counter(); kernels.affine_roundtrip_failures()\n"
    "b = time.perf_counter() - t\n"
    "t = time.perf_counter(); speedup_table()\n"
    "c = time.perf_counter() - t\n"
    "print(f'{kernels.BACKEND},{a:.3f},{b:.3f},{c:.3f}')\n"
)


def per_call(impl, number: int) -> dict[str, float]:
    out = {}
    for name, (stmt, extra) in CALLS.items():
        secs = min(timeit.repeat(stmt, globals={"impl": impl, **extra}, number=number, repeat=3))
        out[name] = secs / number * 1e9
    return out


def workload(backend: str) -> list[str]:
    env = dict(os.environ, CRYPTRISC_BACKEND=backend)
    res = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
    return res.stdout.strip().split(",")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20_000, help="calls per kernel timing")
    args = parser.parse_args()

    py = per_call(_kernels_py, args.repeat)
    cy = per_call(_kernels_cy, args.repeat) if _kernels_cy else {}
    print(f"{'kernel':<16}{'python ns':>12}{'cython ns':>12}{'ratio':>8}")
    for name in CALLS:
        c = cy.get(name)
        ratio = f"{py[name] / c:8.1f}" if c else "       -"
        print(f"{name:<16}{py[name]:12.0f}{(c or float('nan')):12.0f}{ratio}")

    print("\nbackend,tvla_1000_masked_s,affine_exhaustive_s,bench_all_s")
    print(",".join(workload("python")))
    if _kernels_cy:
        print(",".join(workload("cython")))


if __name__ == "__main__":
    main()
