from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("retok._kernels._native", ["src/retok/_kernels/_native.pyx"])],
        language_level="3",
    )

setup(ext_modules=ext_modules)
