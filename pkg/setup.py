import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "isingpulse._kernels_cy",
                ["src/isingpulse/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # no Cython: the package runs on the pure-Python kernels
    extensions = []

setup(ext_modules=extensions)
