"""Build script: optionally compiles the hot plant kernel with Cython.

The kernel source (src/tethersim/_kernels/_core.py) is written in Cython
"pure Python" mode, so it runs unmodified under the plain interpreter.  When
Cython and a C compiler are available we compile it in place; the resulting
extension shadows the .py file at import time.  If compilation fails for any
reason the package installs anyway and falls back to the interpreted kernel.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("TETHERSIM_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("tethersim._kernels._core", ["src/tethersim/_kernels/_core.py"])],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "infer_types": True,
            },
        )
    except Exception as exc:  # pragma: no cover - build environment dependent
        print(f"Cython unavailable ({exc}); installing with pure-Python kernel only")

setup(ext_modules=ext_modules)
