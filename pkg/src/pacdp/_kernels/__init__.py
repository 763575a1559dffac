"""Kernel backend selection.

Imports the compiled extension when available, otherwise the pure-Python
twin.  Set ``PACDP_PURE_KERNELS=1`` to force the pure backend (used by the
equivalence tests and the benchmark).  Both backends are written to agree
bit-for-bit; see ``tests/test_kernels.py``.
"""

import os

from . import _pure as pure

if os.environ.get("PACDP_PURE_KERNELS", "") not in ("", "0"):
    _impl = pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = pure
        BACKEND = "pure"

erfc = _impl.erfc
log_ndtr = _impl.log_ndtr
norm_logpdf = _impl.norm_logpdf
mills_lower = _impl.mills_lower
mills_upper = _impl.mills_upper
censored_loglik = _impl.censored_loglik
censored_dll_dtheta = _impl.censored_dll_dtheta
censored_d2ll_dtheta2 = _impl.censored_d2ll_dtheta2
mh_chain = _impl.mh_chain
