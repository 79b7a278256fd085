"""Build script: compiles the shooting kernel extension when Cython is available.

The package works without the extension (a pure-Python kernel is selected at
import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "qlgs._shoot_cy",
                ["src/qlgs/_shoot_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
