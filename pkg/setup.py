"""Build the optional compiled kernels.

The extension is optional: if Cython is missing or compilation fails the
package installs with only the pure-Python kernels.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "epibench._ckernels",
                ["src/epibench/_ckernels.pyx"],
                # keep a*b+c as two roundings so results match the Python kernels
                extra_compile_args=["-O3", "-ffp-contract=off", "-fno-fast-math"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
