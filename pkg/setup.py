"""Build script.

The compiled evaluation kernel is optional: when Cython (or a C compiler)
is unavailable the package installs in pure-Python mode and selects the
fallback kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("linexp._evalcore", ["src/linexp/_evalcore.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print(f"building without compiled kernel: {exc}")

setup(ext_modules=ext_modules)
