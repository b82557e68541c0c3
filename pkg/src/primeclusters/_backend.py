"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
implementations take over. Callers fetch kernels through :func:`kernels`
at call time so :func:`use_backend` switches take effect immediately.
"""

from __future__ import annotations

from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_AVAILABLE: dict[str, ModuleType] = {"python": _pykernels}
if _ckernels is not None:
    _AVAILABLE["cython"] = _ckernels

_active = "cython" if _ckernels is not None else "python"


def available() -> list[str]:
    return sorted(_AVAILABLE)


def active() -> str:
    return _active


def use_backend(name: str) -> None:
    global _active
    if name not in _AVAILABLE:
        raise ValueError(f"backend {name!r} not available; have {available()}")
    _active = name


def kernels() -> ModuleType:
    return _AVAILABLE[_active]
