from setuptools import Extension, setup
from Cython.Build import cythonize

ext_modules = [
    Extension("ballastplan._kernels", ["src/ballastplan/_kernels.pyx"]),
]

setup(ext_modules=cythonize(ext_modules, language_level=3))
