"""Hot loops of the sampler, compiled when possible.

The Cython/GMP extension ``_ckernels`` is used if it imports; otherwise
the pure-Python twin in ``_pure`` is. Set ``YOUNGWALLS_PURE_PYTHON=1`` to
force the fallback.
"""

import os

from . import _pure

if os.environ.get("YOUNGWALLS_PURE_PYTHON") == "1":
    _impl = _pure
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pure

BACKEND = "compiled" if _impl is not _pure else "python"

collapse_terms = _impl.collapse_terms
cdf_invert_double = _impl.cdf_invert_double
FixedPoly = _impl.FixedPoly

__all__ = ["BACKEND", "FixedPoly", "cdf_invert_double", "collapse_terms"]
