import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "coplan._kernels_c",
    ["src/coplan/_kernels_c.pyx"],
    include_dirs=[np.get_include()],
)

setup(
    ext_modules=cythonize([ext], language_level=3),
)
