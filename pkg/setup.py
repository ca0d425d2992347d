"""Build script for the compiled Chebyshev kernel.

The extension is optional: if Cython (or a C compiler) is unavailable the
package still installs and falls back to the pure-Python kernel at import.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [Extension("chebauth._cheb_core", ["src/chebauth/_cheb_core.pyx"])],
        language_level=3,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
