"""Backend selection for the term kernels.

The compiled module is used when it was built; ``SINGLAG_PURE=1`` forces the
pure-Python kernels.
"""
import os

if os.environ.get("SINGLAG_PURE") == "1":
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "python"

mono_mul = _impl.mono_mul
add_terms = _impl.add_terms
sub_terms = _impl.sub_terms
mul_terms = _impl.mul_terms
scale_terms = _impl.scale_terms
diff_terms = _impl.diff_terms

__all__ = ["BACKEND", "mono_mul", "add_terms", "sub_terms", "mul_terms", "scale_terms", "diff_terms"]
