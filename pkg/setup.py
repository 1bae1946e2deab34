"""Build script for the optional compiled convolution kernels.

The package is pure Python plus one Cython extension holding the dense
mode-pair convolution kernels used by the Galerkin ODE oracle.  If the
extension cannot be built (no compiler, no Cython), installation still
succeeds and the package falls back to the NumPy implementation of the
same kernels at import time.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that degrades to the pure-Python fallback on failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        import warnings

        warnings.warn(
            "torusflow: compiled kernels unavailable (%s); "
            "falling back to the NumPy kernel implementation" % (exc,)
        )


def make_extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "torusflow._convkernels",
        ["src/torusflow/_convkernels.pyx"],
        include_dirs=[numpy.get_include()],
        # -ffp-contract=off keeps the compiled kernels bitwise identical to
        # the NumPy fallback (no FMA contraction of a*b+c).
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level="3")


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
