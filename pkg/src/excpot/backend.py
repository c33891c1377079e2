"""Kernel backend selection.

The compiled Cython module is used when it imports; setting
``EXCPOT_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _purepy

__all__ = ["kernels", "NAME", "get_backend", "available_backends"]


def _load_compiled() -> ModuleType | None:
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


_compiled = _load_compiled()


def available_backends() -> list[str]:
    out = ["python"]
    if _compiled is not None:
        out.insert(0, "cython")
    return out


def get_backend(name: str | None = None) -> ModuleType:
    """Kernel module by name (``"cython"``/``"python"``); ``None`` means default."""
    if name is None:
        if os.environ.get("EXCPOT_PURE_PYTHON", "") not in ("", "0") or _compiled is None:
            return _purepy
        return _compiled
    if name == "python":
        return _purepy
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


kernels = get_backend()
NAME: str = kernels.NAME
