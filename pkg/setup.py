"""Build script for the optional compiled propagation kernel.

The package is fully functional as pure Python; if Cython (or a C compiler)
is unavailable the extension is simply skipped and the slow lane is used.
"""

from setuptools import setup

extensions = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "pbckit._kernels._accel",
                ["src/pbckit/_kernels/_accel.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=extensions)
