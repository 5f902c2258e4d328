"""Backend selection for the hot 5x5 kernels.

The compiled extension is preferred when it imported cleanly; otherwise the
pure-Python twin takes over with identical semantics.  Set the environment
variable ``DIMWITNESS_KERNELS`` to ``python`` or ``compiled`` to force a
backend (forcing ``compiled`` raises if the extension is missing, which is
what you want in a deployment that must not silently slow down).
"""

import os

from . import _kernels_py

_forced = os.environ.get("DIMWITNESS_KERNELS", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
elif _forced == "compiled":
    from . import _kernels_cy as _impl  # ImportError is the point
elif _forced:
    raise ValueError(
        f"DIMWITNESS_KERNELS={_forced!r}: expected 'python' or 'compiled'"
    )
else:
    try:
        from . import _kernels_cy as _impl
    except ImportError:
        _impl = _kernels_py

backend_name = _impl.BACKEND

det5 = _impl.det5
adjugate5 = _impl.adjugate5
prob_matrix = _impl.prob_matrix
sigma_t2_sum = _impl.sigma_t2_sum
adj_frobenius = _impl.adj_frobenius
