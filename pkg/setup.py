"""Build script for the optional compiled eigensolver kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so the extension is marked optional: failed compilation
degrades to the pure-Python backend instead of failing the install.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "cubicmin._kernels._jacobi",
                sources=["src/cubicmin/_kernels/_jacobi.pyx"],
                # -ffp-contract=off keeps the compiled rotation arithmetic
                # bit-compatible enough with the NumPy backend for parity
                # tests at ~1e-13.
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
