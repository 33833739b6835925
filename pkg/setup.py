"""Build script for the optional compiled search kernel.

The package works without the extension (a pure-Python kernel is selected at
import time), so a failed compile should not make the install unusable.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("CUBEBOT_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "cubebot._twophase_cy",
                    ["src/cubebot/_twophase_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
