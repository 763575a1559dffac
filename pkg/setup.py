"""Build script: compiles the optional accelerator extension.

The package is fully functional without the extension (a pure-Python
implementation of the same kernels is selected at import time), so any
failure to compile is downgraded to a warning.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, etc.
            warnings.warn(f"building the compiled kernels failed ({exc}); "
                          "falling back to the pure-Python implementation")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"building {ext.name} failed ({exc}); "
                          "falling back to the pure-Python implementation")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "pacdp._kernels._core",
        ["src/pacdp/_kernels/_core.pyx"],
        extra_compile_args=["-O2"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
