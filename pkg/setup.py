"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a NumPy fallback
is selected at import time); building it just makes pointwise frame
evaluation and determinant scans faster.
"""
import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "dploop._kernels._fast",
        ["src/dploop/_kernels/_fast.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level="3"))
