"""Kernel backend selection.

The compiled extension is preferred when present; the pure-Python
kernel is the fallback and the semantic reference.  Both produce
bit-identical output.  Set BEATSTREAM_KERNEL=python or =compiled to
force a backend (compiled raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    from . import _kernel as _compiled
except ImportError:
    _compiled = None


def available_backends() -> dict[str, type]:
    backends = {"python": _kernel_py.DetectorKernel}
    if _compiled is not None:
        backends["compiled"] = _compiled.DetectorKernel
    return backends


def kernel_class(backend: str | None = None) -> type:
    """Resolve a kernel class: explicit arg > env var > compiled > python."""
    if backend is None:
        backend = os.environ.get("BEATSTREAM_KERNEL")
    if backend is None:
        backend = "compiled" if _compiled is not None else "python"
    try:
        return available_backends()[backend]
    except KeyError:
        raise ImportError(f"kernel backend {backend!r} not available") from None


DEFAULT_BACKEND = "compiled" if _compiled is not None else "python"
