"""Eigensolver kernel backends.

The compiled Cython sweep is preferred when the extension built; a NumPy
implementation of the identical sweep is the fallback.  Setting the
environment variable CUBICMIN_PURE_PYTHON to any non-empty value forces
the fallback, which is what the parity tests and benchmarks rely on.
"""

import os

if os.environ.get("CUBICMIN_PURE_PYTHON"):
    from cubicmin._kernels._jacobi_py import cyclic_jacobi

    BACKEND = "python"
else:
    try:
        from cubicmin._kernels._jacobi import cyclic_jacobi

        BACKEND = "compiled"
    except ImportError:
        from cubicmin._kernels._jacobi_py import cyclic_jacobi

        BACKEND = "python"

__all__ = ["BACKEND", "cyclic_jacobi"]
