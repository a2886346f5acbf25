"""Backend selection for the quadrature kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` twin.  Setting ``EXPCHAR_PURE_PYTHON=1`` forces
the fallback.
"""

import os

from . import _pykernels

if os.environ.get("EXPCHAR_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

max2_third_density = _impl.max2_third_density
scaled_sum2_density = _impl.scaled_sum2_density
scaled_sum3_density = _impl.scaled_sum3_density
pdf = _impl.pdf
cdf = _impl.cdf
sf = _impl.sf


def backends():
    """All importable kernel modules, keyed by name."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
