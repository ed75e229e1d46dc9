"""Build script: compiles the optional Cython transfer-matrix kernel.

The package is fully functional without the compiled extension (a vectorized
numpy fallback is selected at import time), so any failure to build the
extension degrades gracefully to a pure-Python install.

Build in place for development:

    python setup.py build_ext --inplace
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/floquet_qc/_kernels.pyx",
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )
    include_dirs = [np.get_include()]
except ImportError:
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
