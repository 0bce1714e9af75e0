"""Builds the optional compiled max-flow core.

The package works without the extension: curvseg.core falls back to the
pure-Python kernel at import time if the compiled module is missing.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "curvseg.core._maxflow",
                sources=["src/curvseg/core/_maxflow.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
