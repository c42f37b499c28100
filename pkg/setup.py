"""Build the optional Cython kernel; the package falls back to numpy without it."""

from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:  # no compiler toolchain: pure-Python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "stackel.numeric._ckernels",
                ["src/stackel/numeric/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
