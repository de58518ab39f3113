"""Build script: compiles the hot-loop kernels when Cython is available.

The package works without the extension; eavesim.kernels falls back to the
numpy implementation at import time.
"""
from setuptools import setup, Extension

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("eavesim._core", ["src/eavesim/_core.pyx"])],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
