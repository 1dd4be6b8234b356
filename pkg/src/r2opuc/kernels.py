"""Hot-loop backend, chosen once at import.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
pure-Python ``_kernels_py`` module is used.  Set ``R2OPUC_PURE_PYTHON=1`` to
force the fallback (tests and the benchmark compare both).
"""
import os

from . import _kernels_py as python_backend

try:
    if os.environ.get("R2OPUC_PURE_PYTHON"):
        raise ImportError("pure-Python backend forced by environment")
    from . import _ckernels as compiled_backend
except ImportError:
    compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

p_eval = _impl.p_eval
p_eval_many = _impl.p_eval_many
sturm_count = _impl.sturm_count
sturm_zeros = _impl.sturm_zeros
prev_at_zero = _impl.prev_at_zero
twisted_ratios = _impl.twisted_ratios
twisted_refine = _impl.twisted_refine
backward_chain = _impl.backward_chain


def available_backends():
    """Return ``{name: module}`` for every backend that can be imported."""
    out = {"python": python_backend}
    if compiled_backend is not None:
        out["cython"] = compiled_backend
    return out
