"""Build the compiled twin of the tableau kernel.

``csl/_engine.py`` is plain Python and fully functional on its own; here it
is additionally cythonized into ``csl._engine_cy``, which ``csl.tableau``
prefers at import time.  Set CSL_SKIP_EXT=1 to skip the extension build
(the package then runs on the pure kernel)."""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CSL_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("csl._engine_cy", ["src/csl/_engine.py"])],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
