"""Build script: compiles the optional frame-propagation extension.

The package works without the extension (a pure NumPy twin of the kernel
is selected at import time), so a failed extension build must not fail
the install.
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
                "hypframe._propagation",
                ["src/hypframe/_propagation.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # noqa: BLE001 - any build-chain gap falls back to pure python
    print(f"hypframe: skipping compiled kernel ({exc}); pure NumPy fallback will be used")

setup(ext_modules=ext_modules)
