"""Build script: compiles the optional speedup extension.

The package works without the extension (a pure-Python kernel module is
selected at import time), so compilation failures are non-fatal.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fgsym._speedups",
                sources=["src/fgsym/_speedups.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
