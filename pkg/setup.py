import os

import numpy as np
from setuptools import Extension, setup

# TEXRD_NO_EXT=1 builds a pure-Python install (the kernels fall back to numpy).
ext_modules = []
if not os.environ.get("TEXRD_NO_EXT"):
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "texrd._ckernels",
            ["src/texrd/_ckernels.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            # no FMA contraction: tree splits must match the numpy fallback bit for bit
            extra_compile_args=["-O3", "-ffp-contract=off"],
        )
    ]
    ext_modules = cythonize(
        extensions,
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )

setup(ext_modules=ext_modules)
