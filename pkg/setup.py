"""Build the optional compiled kernels; the package works without them."""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("CHEN_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize

        ext = Extension("chenloops._kernels", ["src/chenloops/_kernels.pyx"], optional=True)
        ext_modules = cythonize([ext], compiler_directives={"language_level": 3}, quiet=True)
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
