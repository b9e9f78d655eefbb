"""Build script for the optional Cython blur kernel.

The package is fully functional without the compiled extension (a NumPy
fallback is selected at import time), so a failed extension build must not
fail the install.  Build in place for development with:

    python setup.py build_ext --inplace
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "camsim._kernels._bokeh_cy",
                ["src/camsim/_kernels/_bokeh_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"camsim: skipping Cython kernel build ({exc}); "
          "the pure-NumPy fallback will be used", file=sys.stderr)

setup(ext_modules=ext_modules)
