import os

import numpy as np
from setuptools import Extension, setup

# The compiled kernel is optional: the package falls back to numpy when it is missing.
ext_modules = []
if os.environ.get("QSPLINE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "qspline._gl_core",
                    ["src/qspline/_gl_core.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
