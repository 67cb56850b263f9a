"""Backend selection for the replication loops.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``QUICKEST_SELECTION_BACKEND=python`` to force the fallback.
"""

import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _fallback}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

if os.environ.get("QUICKEST_SELECTION_BACKEND", "").lower() == "python" or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "compiled"


def get_backend(name=None):
    """Kernel module by name; ``None`` means the active one."""
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
