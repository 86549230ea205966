import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("LOCLAB_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize

        extensions = [
            Extension(
                "loclab._ext",
                sources=["src/loclab/_ext.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ]
        ext_modules = cythonize(
            extensions, compiler_directives={"language_level": "3"}
        )
    except ImportError:
        # Pure-python fallback kernels are selected at import time, so the
        # package stays usable without the compiled core.
        ext_modules = []

setup(ext_modules=ext_modules)
