"""Pick the compiled kernels when they are importable, numpy otherwise.

Set ``HOBOKIT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
import warnings

from . import _fallback

kernels = _fallback

if os.environ.get("HOBOKIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:  # extension not built
        warnings.warn("hobokit compiled kernels unavailable; using the numpy fallback",
                      RuntimeWarning, stacklevel=2)
        kernels = _fallback

NAME = kernels.BACKEND


def use(name: str):
    """Switch backend at runtime (``"compiled"`` or ``"python"``); returns the old name."""
    global kernels, NAME
    old = NAME
    if name == "python":
        kernels = _fallback
    elif name == "compiled":
        from . import _kernels
        kernels = _kernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    NAME = kernels.BACKEND
    return old
