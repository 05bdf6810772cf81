"""Binary-morphology kernels with a compiled core and a pure fallback.

The Cython extension (_fast) is preferred when importable; otherwise the
vectorized numpy backend (_pure) is used. Both implement identical
bit-level semantics, so callers never need to know which one is active.
Set GLYPHDICT_PURE=1 to force the fallback.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("GLYPHDICT_PURE"):
    _impl = _pure
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure

BACKEND: str = _impl.BACKEND

thin = _impl.thin
erode_cross = _impl.erode_cross
dilate_disc = _impl.dilate_disc
erode_disc = _impl.erode_disc
label_components = _impl.label_components


def backends() -> dict[str, object]:
    """All importable backends, for parity tests and benchmarks."""
    found: dict[str, object] = {"pure": _pure}
    try:
        from . import _fast

        found["cython"] = _fast
    except ImportError:
        pass
    return found
