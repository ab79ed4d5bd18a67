from setuptools import setup, Extension

try:
    from Cython.Build import cythonize
except ImportError:  # the NumPy stepping loop is used instead
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("orrw._walk", ["src/orrw/_walk.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
