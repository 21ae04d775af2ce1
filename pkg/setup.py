"""Build script: compiles the optional Cython hot-loop core.

The package works without the extension (pure-Python kernels are selected
at import time); building it makes the simulation harness roughly two
orders of magnitude faster.
"""
from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "copeland_bandits._kernels._fastcore",
                ["src/copeland_bandits/_kernels/_fastcore.pyx"],
                # -ffp-contract=off keeps float results bit-identical to the
                # pure-Python kernels (no fused multiply-add).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
