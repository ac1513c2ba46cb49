"""Build script for the optional compiled kernel extension.

The package works without the extension: stepgraph.kernels falls back to
the pure-Python implementations when stepgraph._ckernels is missing.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("STEPGRAPH_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "stepgraph._ckernels",
                    ["src/stepgraph/_ckernels.pyx"],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
