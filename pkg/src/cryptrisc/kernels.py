"""Hot-kernel backend selection.

The compiled Cython extension is used when it has been built; otherwise the
pure-Python twin is loaded. Set ``CRYPTRISC_BACKEND=python`` to force the
fallback (handy for benchmarking and for checking that both agree).
"""

from __future__ import annotations

import os

if os.environ.get("CRYPTRISC_BACKEND", "").lower() == "python":
    from cryptrisc import _kernels_py as _impl
else:
    try:
        from cryptrisc import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from cryptrisc import _kernels_py as _impl

BACKEND: str = _impl.BACKEND
lfsr_advance64 = _impl.lfsr_advance64
affine_fwd64 = _impl.affine_fwd64
affine_inv64 = _impl.affine_inv64
sub_bytes64 = _impl.sub_bytes64
popcount64 = _impl.popcount64
affine_roundtrip_failures = _impl.affine_roundtrip_failures

__all__ = [
    "BACKEND",
    "lfsr_advance64",
    "affine_fwd64",
    "affine_inv64",
    "sub_bytes64",
    "popcount64",
    "affine_roundtrip_failures",
]
