import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the compiled stepping kernel when possible.

    The package is fully functional without it: cantorbeam._kernel falls
    back to the pure-Python kernel at import time.
    """

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing entirely
            warnings.warn(f"compiled kernel skipped ({exc}); pure-Python kernel will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernel skipped ({exc}); pure-Python kernel will be used")


try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "cantorbeam._kernel_fast",
                ["src/cantorbeam/_kernel_fast.pyx"],
                # -ffp-contract=off keeps the compiled kernel bit-identical
                # to the pure-Python one (no FMA reassociation).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": OptionalBuildExt})
