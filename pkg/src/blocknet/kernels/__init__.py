"""Kernel backend selection.

``blocknet.kernels._native`` (Cython, GIL-released loops) is preferred when
the extension was compiled; otherwise the numpy fallback is used.  Override
with ``BLOCKNET_KERNELS=native`` or ``BLOCKNET_KERNELS=numpy``.
"""

import importlib
import os

import numpy as np

from . import _fallback

_forced = os.environ.get("BLOCKNET_KERNELS")
if _forced not in (None, "", "native", "numpy"):
    raise ValueError(f"unknown BLOCKNET_KERNELS value {_forced!r}")

_native = None
if _forced in (None, "", "native"):
    try:
        _native = importlib.import_module("._native", __name__)
    except ImportError:
        _native = None
if _forced == "native" and _native is None:
    raise ImportError(
        "BLOCKNET_KERNELS=native but the compiled kernels are not available; "
        "reinstall with a working C toolchain"
    )

_active = _native if _native is not None else _fallback


def backend_name() -> str:
    return "native" if _active is not _fallback else "numpy"


def available_backends() -> dict:
    """Name -> module, for side-by-side kernel benchmarks."""
    out = {"numpy": _fallback}
    if _native is not None:
        out["native"] = _native
    return out


def merge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Merge two sorted 1-D arrays of the same dtype into a fresh array."""
    return _active.merge(a, b)


def overlap(a: np.ndarray, b: np.ndarray) -> int:
    """Multiset intersection size of two sorted 1-D arrays of one dtype."""
    return int(_active.overlap(a, b))
