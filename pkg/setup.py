"""Build the optional compiled simplex kernel.

If Cython or a C compiler is unavailable the package installs without it and
``sncert.numerics.lp`` falls back to the pure-Python loop.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("SNCERT_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension(
                "sncert.numerics._simplex_ext",
                ["src/sncert/numerics/_simplex_ext.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )],
            compiler_directives={"language_level": "3"},
        )
    except Exception as exc:  # pragma: no cover - build environment dependent
        print(f"sncert: building without compiled kernel ({exc})")

setup(ext_modules=ext_modules)
