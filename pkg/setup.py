import os

from setuptools import setup

ext_modules = []
if os.environ.get("IETKHINCHIN_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            "src/ietkhinchin/_speedups.pyx",
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        # the package runs on its pure-Python kernels without the extension
        ext_modules = []

setup(ext_modules=ext_modules)
