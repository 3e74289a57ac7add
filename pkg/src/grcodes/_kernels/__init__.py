"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation.
Set GRCODES_PURE=1 to force the fallback (used by the benchmark and by
tests that must exercise both code paths).
"""

import os

if os.environ.get("GRCODES_PURE"):
    from . import pure as backend
else:
    try:
        from . import _gfcore as backend  # type: ignore[attr-defined]
    except ImportError:
        from . import pure as backend

NAME = backend.NAME
gf2_mul = backend.gf2_mul
gf2_matmul = backend.gf2_matmul
gf2_conv = backend.gf2_conv
gf2_rref = backend.gf2_rref
