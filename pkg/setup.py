"""Build script for the optional compiled merge kernels.

The package is fully functional without the extension (a numpy fallback is
selected at import time); set BLOCKNET_REQUIRE_NATIVE=1 to turn a failed
extension build into a hard error.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

REQUIRE_NATIVE = os.environ.get("BLOCKNET_REQUIRE_NATIVE") == "1"


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or toolchain missing
            if REQUIRE_NATIVE:
                raise
            print(f"blocknet: skipping native kernels ({exc}); "
                  "the numpy fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            if REQUIRE_NATIVE:
                raise
            print(f"blocknet: could not compile {ext.name} ({exc}); "
                  "the numpy fallback will be used")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        if REQUIRE_NATIVE:
            raise
        return []
    ext = Extension(
        "blocknet.kernels._native",
        ["src/blocknet/kernels/_native.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
