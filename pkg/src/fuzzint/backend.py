"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; set
``FUZZINT_PURE=1`` (or call :func:`use`) to force the pure-Python kernels.
All hot paths look the backend up through ``backend.kernels`` at call time,
so swapping is safe at any point.
"""

from __future__ import annotations

import os

from . import _kernels_py

_COMPILED = None
if os.environ.get("FUZZINT_PURE", "").strip() not in ("", "0"):
    kernels = _kernels_py
else:
    try:
        from . import _kernels as _COMPILED  # type: ignore[attr-defined]
    except ImportError:
        _COMPILED = None
    kernels = _COMPILED if _COMPILED is not None else _kernels_py


def name() -> str:
    return kernels.BACKEND_NAME


def available() -> list[str]:
    global _COMPILED
    if _COMPILED is None:
        try:
            from . import _kernels as compiled  # type: ignore[attr-defined]
            _COMPILED = compiled
        except ImportError:
            pass
    out = ["pure-python"]
    if _COMPILED is not None:
        out.insert(0, "cython")
    return out


def use(which: str):
    """Switch backends; ``which`` is 'cython' or 'pure-python'."""
    global kernels, _COMPILED
    if which in ("pure-python", "pure", "python"):
        kernels = _kernels_py
        return kernels
    if which in ("cython", "compiled"):
        if _COMPILED is None:
            from . import _kernels as compiled  # raises if not built
            _COMPILED = compiled
        kernels = _COMPILED
        return kernels
    raise ValueError(f"unknown backend {which!r}")
