"""Build script: compiles the optional scan kernel extension when possible.

The package is fully functional without the extension; ``weylscope._scan``
falls back to a NumPy implementation of the same kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "weylscope._scan_cython",
                ["src/weylscope/_scan_cython.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    import sys

    print(f"weylscope: building without compiled scan kernel ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
