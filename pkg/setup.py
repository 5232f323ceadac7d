"""Build script: compiles the block tri-diagonal kernel when Cython and a C
compiler are available.  The package installs fine without it; the pure-numpy
fallback is selected at import time."""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/moorbeam/_blocktri.pyx"],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
