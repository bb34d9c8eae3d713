"""Builds the optional compiled term kernels; the package works without them."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("SINGLAG_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/singlag/symcore/_ckernels.pyx"],
            compiler_directives={"language_level": "3"},
            quiet=True,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
