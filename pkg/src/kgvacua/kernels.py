"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when
``KGVACUA_PURE_PYTHON=1`` is set, the pure-Python kernels are used.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("KGVACUA_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        _impl = _compiled
        BACKEND = "compiled"

hyp0f1 = _impl.hyp0f1
hyp1f1 = _impl.hyp1f1
airy_maclaurin = _impl.airy_maclaurin
taylor_march = _impl.taylor_march
rk4_modes = _impl.rk4_modes

AIRY = _kernels_py.AIRY
BESSEL = _kernels_py.BESSEL
WHITTAKER = _kernels_py.WHITTAKER


def backends():
    """Available kernel modules keyed by name."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
        out["compiled"] = _kernels
    except ImportError:
        pass
    return out
