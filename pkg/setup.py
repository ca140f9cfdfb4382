"""Build script: compiles the optional exact-linear-algebra kernel.

The package is fully functional without the extension (a pure-Python
fallback with the same API is selected at import time), so a failed
build of `perfx._speedups` must not abort the install.
"""

import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, cython missing, ...
            sys.stderr.write(f"perfx: skipping compiled kernel ({exc})\n")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            sys.stderr.write(f"perfx: skipping compiled kernel ({exc})\n")


ext_modules = []
if os.environ.get("PERFX_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            "src/perfx/_speedups.pyx",
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
