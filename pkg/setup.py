"""Build script for the compiled kernel extension.

The pure-Python package works without the extension; ``banditindex.kernels``
falls back to a NumPy implementation when the compiled module is missing.
"""
from __future__ import annotations

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "banditindex.kernels._core",
                ["src/banditindex/kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Fall back to a pre-generated C file when Cython is unavailable.
    extensions = [
        Extension(
            "banditindex.kernels._core",
            ["src/banditindex/kernels/_core.c"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )
    ]

setup(ext_modules=extensions)
