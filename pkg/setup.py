"""Build the optional compiled kernels.

If Cython or a C compiler is missing the package still installs; the
pure-Python fallback in ``sqext._fastla_py`` is used at import time.
"""

import numpy as np
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "sqext._fastla",
                ["src/sqext/_fastla.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
