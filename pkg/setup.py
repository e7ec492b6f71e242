"""Build script for the compiled shortest-path core.

The package works without the extension (a pure-Python fallback is picked
up at import time), so a failed build is downgraded to a warning rather
than an install failure.
"""

import sys

from setuptools import setup
from setuptools.extension import Extension


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        sys.stderr.write("warning: Cython not available, building without the compiled core\n")
        return []
    ext = Extension(
        "wellpath._core._gridpath",
        ["src/wellpath/_core/_gridpath.pyx"],
        # -ffp-contract=off: the fallback must produce bit-identical distances,
        # so fused multiply-adds in the relaxation arithmetic are not allowed.
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=_extensions())
