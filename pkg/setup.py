from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "prclab._kernels._core",
        ["src/prclab/_kernels/_core.pyx"],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )
)
