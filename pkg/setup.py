"""Build script for the optional compiled eigensolver kernel.

The package is pure Python plus one Cython extension (`tailwalk._kernel_cy`).
If Cython or a C compiler is unavailable the build degrades gracefully and
the numpy fallback kernel is used at runtime instead.
"""
import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible; otherwise warn and continue."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"compiled kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernel {ext.name} skipped: {exc}")


ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "tailwalk._kernel_cy",
                ["src/tailwalk/_kernel_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError as exc:
    warnings.warn(f"Cython/numpy unavailable, building without compiled kernel: {exc}")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
