"""Build script: compiles the optional search kernel extension.

The package works without the extension (a pure-Python twin is selected
at import time), so a failed cythonize/compile is not fatal.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "connkit._kernel._speedups",
                ["src/connkit/_kernel/_speedups.pyx"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
