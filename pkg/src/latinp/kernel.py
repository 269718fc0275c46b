"""Backend selection for the search kernel.

The compiled extension is used when it was built; set ``LATINP_PURE=1`` to
force the pure-Python fallback.
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    if os.environ.get("LATINP_PURE", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _kernel as _impl  # type: ignore[attr-defined]
except ImportError:
    _impl = _kernel_py

BACKEND: str = _impl.BACKEND
search = _impl.search


def available_backends() -> dict[str, object]:
    out: dict[str, object] = {"python": _kernel_py}
    try:
        from . import _kernel  # type: ignore[attr-defined]

        out["cython"] = _kernel
    except ImportError:
        pass
    return out
