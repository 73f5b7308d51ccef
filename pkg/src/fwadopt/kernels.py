"""Selects the compiled kernels when the extension is built, else the Python fallback."""

from __future__ import annotations

from types import ModuleType

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = ("compiled", "python")
DEFAULT = "compiled" if _compiled is not None else "python"


def available() -> list[str]:
    return [b for b in BACKENDS if b == "python" or _compiled is not None]


def get(backend: str | None = None) -> ModuleType:
    """Kernel module for ``backend`` (``None`` picks the default)."""
    name = backend or DEFAULT
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; reinstall with Cython available")
        return _compiled
    if name == "python":
        return _pykernels
    raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
