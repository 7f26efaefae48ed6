"""Builds the optional compiled kernels; the package falls back to pure Python without them."""
import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension(
            "warpmetric._ckernels",
            ["src/warpmetric/_ckernels.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3", "-fno-math-errno"],
            language="c++",
        )],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
