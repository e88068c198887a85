"""Build script for the optional compiled simplex kernel.

The package works without the extension (a numpy implementation of the same
kernel is selected at import time), so a failed compile only costs speed.
``-ffp-contract=off`` keeps the compiled kernel's floating-point results
bit-identical to the numpy fallback: both must perform plain
multiply-then-subtract row updates, without fused multiply-add.
"""

import sys

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    extra_args = []
    if not sys.platform.startswith("win"):
        extra_args = ["-O3", "-ffp-contract=off"]
    ext_modules = cythonize(
        [
            Extension(
                "vnfplace.solver._tableau_cy",
                ["src/vnfplace/solver/_tableau_cy.pyx"],
                extra_compile_args=extra_args,
            )
        ],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
