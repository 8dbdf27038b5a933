"""Build script for the compiled integration kernel.

The package works without the extension (a pure-Python twin of the stepper
is selected at import time), so failure to build _rk_c only costs speed.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension("qpencil._rk_c", ["src/qpencil/_rk_c.pyx"]),
]

if cythonize is not None:
    extensions = cythonize(
        extensions,
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    setup(ext_modules=extensions)
else:
    # source distribution without Cython: install pure-Python only
    setup()
