import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("EZGUIDE_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("ezguide._loop", ["src/ezguide/_loop.pyx"])],
            language_level=3,
            compiler_directives={"boundscheck": False, "wraparound": False},
        )
    except Exception as exc:  # pure-Python fallback still works
        print(f"warning: building without compiled core ({exc})")

setup(ext_modules=ext_modules)
