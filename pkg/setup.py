"""Builds the optional compiled kernel extension.

The package is fully functional without the extension: gaplab._kernels
falls back to vectorized numpy implementations at import time. Building
with Cython just makes the hot loops (ray casting, Frechet DP, DBSCAN)
faster. Any build failure is therefore non-fatal.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that downgrades compiler failures to a warning."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            print(f"gaplab: skipping native kernels ({exc}); using python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            print(f"gaplab: skipping {ext.name} ({exc}); using python fallback")


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("gaplab: Cython not available; using python fallback kernels")
        return []
    ext = Extension(
        "gaplab._kernels._native",
        sources=["src/gaplab/_kernels/_native.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=_extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
