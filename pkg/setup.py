"""Build script: compiles the small-matrix kernel extension when a C
toolchain is available.  The package works without it; ``dimwitness.kernels``
falls back to the pure-Python implementation at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext = Extension(
        "dimwitness._kernels_cy",
        ["src/dimwitness/_kernels_cy.pyx"],
        # -ffp-contract=off: keep the arithmetic bit-for-bit comparable with
        # the pure-Python path (no fused multiply-add contraction).
        extra_compile_args=["-O3", "-ffp-contract=off"],
        optional=True,
    )
    ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})
except ImportError:
    pass

setup(ext_modules=ext_modules)
