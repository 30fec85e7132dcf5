"""Build script: compiles the optional Cython kernel.

The package works without the extension (a pure-numpy backend is selected
at import time), so a failed compile only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy

    ext_modules = cythonize(
        [
            Extension(
                "chainsynth._kernels._fast",
                ["src/chainsynth/_kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - depends on build env
    print(f"chainsynth: building without compiled kernels ({exc})")

setup(ext_modules=ext_modules)
