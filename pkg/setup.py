"""Build script: compiles the optional speedup extension when a toolchain
is available, and falls back to the pure-python kernels otherwise."""

import os

from setuptools import setup

ext_modules = []
if not int(os.environ.get("ATTN_OPT_SKIP_EXT", "0")):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "attnopt._kernels._speedups",
                    ["src/attnopt/_kernels/_speedups.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
