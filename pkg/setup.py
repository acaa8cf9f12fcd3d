"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so any build failure here downgrades to a plain
pure-Python install instead of aborting.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("RQTRAJ_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "rqtraj._kernels._core",
                    ["src/rqtraj/_kernels/_core.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except Exception as exc:  # pragma: no cover - build-environment dependent
        import sys

        print(f"rqtraj: Cython extension disabled ({exc!r})", file=sys.stderr)
        ext_modules = []

setup(ext_modules=ext_modules)
