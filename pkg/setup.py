import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [Extension("fuzzint._kernels", ["src/fuzzint/_kernels.pyx"],
                   include_dirs=[np.get_include()],
                   extra_compile_args=["-O3"])],
        language_level=3,
    )

setup(ext_modules=extensions)
