"""Build script: compiles the optional Cython kernel.

The package works without the extension (a pure-Python kernel is selected at
import time); the compiled kernel is what makes large Monte Carlo sweeps fast.
"""

import sys

from setuptools import Extension, setup

try:
    import os

    import numpy
    import numpy.random
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - source-only install
    numpy = None
    cythonize = None

ext_modules = []
if cythonize is not None:
    # the C distribution functions (random_standard_normal, ...) live in
    # numpy's static helper library shipped next to numpy.random
    npyrandom_dir = os.path.join(os.path.dirname(numpy.random.__file__), "lib")
    ext_modules = cythonize(
        [
            Extension(
                "gkptrack.kernels._fast",
                ["src/gkptrack/kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                library_dirs=[npyrandom_dir],
                libraries=["npyrandom"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    print("Cython/numpy not available at build time; installing pure-Python only", file=sys.stderr)

setup(ext_modules=ext_modules)
