"""Kernel backend selection: compiled extension with pure-Python fallback.

The compiled module is preferred when importable; set ``FGSYM_BACKEND`` to
``python`` or ``compiled`` to force one.  Detection code calls the
module-level wrappers below, so a backend switch (tests, benchmarks)
takes effect immediately.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

FOUND = _kernels_py.FOUND
EXHAUSTED = _kernels_py.EXHAUSTED
BUDGET = _kernels_py.BUDGET

try:
    from . import _speedups
except ImportError:
    _speedups = None


def available_backends() -> list[str]:
    names = ["python"]
    if _speedups is not None:
        names.insert(0, "compiled")
    return names


def _resolve(name: str):
    if name == "python":
        return _kernels_py
    if name == "compiled":
        if _speedups is None:
            raise RuntimeError("compiled kernels are not available in this install")
        return _speedups
    raise ValueError(f"unknown backend {name!r} (use 'compiled' or 'python')")


_requested = os.environ.get("FGSYM_BACKEND", "").strip().lower()
if _requested in ("", "auto"):
    _active = _speedups if _speedups is not None else _kernels_py
else:
    _active = _resolve(_requested)


def set_backend(name: str) -> None:
    global _active
    _active = _resolve(name)


def backend_name() -> str:
    return _active.BACKEND_NAME


def _as_i64(seq) -> np.ndarray:
    return np.ascontiguousarray(seq, dtype=np.int64)


def verify_table_perm(t1, t2, radices, tstrides) -> bool:
    if _active is _kernels_py:
        return _kernels_py.verify_table_perm(t1, t2, radices, tstrides)
    return _active.verify_table_perm(
        _as_i64(t1), _as_i64(t2), _as_i64(radices), _as_i64(tstrides)
    )


def search_rearrangements(t1, t2, radices, strides2, masks,
                          max_verifications: int = -1, deadline=None):
    n = len(masks)
    if _active is _kernels_py or n > 64:
        return _kernels_py.search_rearrangements(
            t1, t2, radices, strides2, masks, max_verifications, deadline
        )
    return _active.search_rearrangements(
        _as_i64(t1),
        _as_i64(t2),
        _as_i64(radices),
        _as_i64(strides2),
        np.ascontiguousarray(masks, dtype=np.uint64),
        max_verifications,
        deadline,
    )
