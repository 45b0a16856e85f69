"""Build the optional compiled GF(2) kernel.

If Cython or a C compiler is missing the package still installs and runs on
the pure-Python elimination path.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("jokerkit._f2kernel", ["src/jokerkit/_f2kernel.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # noqa: BLE001
    print(f"jokerkit: building without compiled kernel ({exc})")

setup(ext_modules=ext_modules)
