import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    USE_CYTHON = True
except ImportError:
    USE_CYTHON = False

# Set SECPLF_NO_EXT=1 to install without the compiled kernels.
NO_EXT = os.environ.get("SECPLF_NO_EXT", "") not in ("", "0")

EXTENSIONS = []
if USE_CYTHON and not NO_EXT:
    EXTENSIONS = cythonize(
        [
            Extension(
                "secplf._kernels",
                ["src/secplf/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=EXTENSIONS)
