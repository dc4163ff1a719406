"""Build script for the optional compiled kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time); the Cython kernel just makes the structured-prior
inner loop faster.  Build in place with:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "sparsemix.kernels._esp_cy",
                ["src/sparsemix/kernels/_esp_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
