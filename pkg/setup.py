import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

ext_modules = cythonize(
    [
        Extension(
            "occseg.netmc._kernel",
            ["src/occseg/netmc/_kernel.pyx"],
            include_dirs=[numpy.get_include()],
        )
    ],
    compiler_directives={
        "language_level": "3",
        "boundscheck": False,
        "wraparound": False,
        "cdivision": True,
    },
)

setup(ext_modules=ext_modules)
