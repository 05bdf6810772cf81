"""Builds the optional compiled kernel extension.

The package is fully functional without it: glyphdict.kernels falls back to
the vectorized numpy backend when the extension is absent. Build in place
with `python setup.py build_ext --inplace` (requires Cython and a C
compiler), or set GLYPHDICT_PURE=1 to skip the extension entirely.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("GLYPHDICT_PURE"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "glyphdict.kernels._fast",
                    ["src/glyphdict/kernels/_fast.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O2"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
