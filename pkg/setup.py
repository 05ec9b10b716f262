import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("REGBIP_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "regbip._ckernels",
                    ["src/regbip/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # pure-Python install; regbip.kernels falls back to numpy
        ext_modules = []

setup(ext_modules=ext_modules)
