import os

import numpy as np
from setuptools import Extension, setup

# Set STOCHHEAT_NO_EXT=1 to install only the pure-Python kernels.
ext_modules = []
if not os.environ.get("STOCHHEAT_NO_EXT"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "stochheat._kernels",
                ["src/stochheat/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
