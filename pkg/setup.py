import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        [
            Extension(
                "amred._kernels._ckernels",
                ["src/amred/_kernels/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # Keep mul+add as two rounded operations so the compiled
                # kernel walks bit-identical paths to the numpy fallback.
                extra_compile_args=["-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
)
