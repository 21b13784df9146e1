"""Build script for the optional compiled detector kernel.

The package works without the extension (a pure-Python kernel is
selected at import time), so a failed compile must not fail the
install.  -ffp-contract=off keeps the compiled arithmetic bit-identical
to the interpreter's.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "beatstream._kernel",
                ["src/beatstream/_kernel.pyx"],
                extra_compile_args=["-O2", "-ffp-contract=off"],
                optional=True,
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
