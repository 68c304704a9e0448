"""Backend selection for the stepping kernel.

The compiled extension is preferred; the pure-Python kernel is the
fallback.  Set CANTORBEAM_PURE=1 to force the fallback (used by tests and
the backend benchmark).
"""

import os

if os.environ.get("CANTORBEAM_PURE"):
    from . import _kernel_py as _impl
else:
    try:
        from . import _kernel_fast as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as _impl

BACKEND: str = _impl.BACKEND
run_steps = _impl.run_steps
