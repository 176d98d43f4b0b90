"""Search kernels: compiled when the extension was built, pure Python otherwise.

Set ``PLOPT_KERNELS=python`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType
from typing import Sequence

from plopt._kernels import _pykernels

INT64_MAX = 2**63 - 1

try:
    from plopt._kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None

if os.environ.get("PLOPT_KERNELS", "").lower() == "python":
    _native: ModuleType | None = None
else:
    _native = _ckernels

BACKEND = _native.NAME if _native is not None else _pykernels.NAME


def available() -> list[ModuleType]:
    return [m for m in (_ckernels, _pykernels) if m is not None]


def get(name: str | None = None) -> ModuleType:
    if name is None:
        return _native if _native is not None else _pykernels
    for m in available():
        if m.NAME == name:
            return m
    raise ValueError(f"kernel backend {name!r} is not available")


def select(adj: Sequence[int], *int_arrays: Sequence[int], extra: int = 0, name: str | None = None) -> ModuleType:
    """Pick the compiled backend if the instance fits machine integers."""
    if name is not None:
        return get(name)
    if _native is None or len(adj) > _native.MAX_ITEMS:
        return _pykernels
    for arr in int_arrays:
        if sum(abs(x) for x in arr) + abs(extra) > INT64_MAX:
            return _pykernels
    return _native
