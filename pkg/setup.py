"""Build script for the optional compiled ring-sweep kernel.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes large simulations faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "chain_gather.kernels._core",
                ["src/chain_gather/kernels/_core.pyx"],
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
