"""Build script for the compiled walk/recursion kernels.

The extension is optional at runtime: `rwre.kernels` falls back to the pure
Python implementations in `rwre._kernels_py` when the compiled module is
missing (or when RWRE_PURE_PYTHON=1 is set).  Set RWRE_SKIP_EXT=1 to install
without compiling, e.g. to exercise the fallback path.
"""

import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("RWRE_SKIP_EXT") == "1":
        return []
    import numpy as np
    from Cython.Build import cythonize

    ext = Extension(
        "rwre._kernels",
        ["src/rwre/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )


setup(ext_modules=extensions())
