"""Build script for the optional compiled kernels.

If Cython or a C compiler is missing the package installs without the
extension and falls back to ``excpot._purepy`` at import time.
"""

import numpy as np
from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "excpot._ckernels",
                ["src/excpot/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                # exact IEEE semantics are required by the double-double code
                extra_compile_args=["-O2", "-fno-fast-math", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"excpot: building without compiled kernels ({exc})")
    ext_modules = []

setup(ext_modules=ext_modules)
