"""Optional Cython build of the sparse kernels.

If Cython, a compiler or the gmpy2 headers are missing, the package still
installs and falls back to the pure-Python kernels.
"""
import glob
import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _gmp_link_args(gmpy2_dir):
    # link against the libgmp copy that gmpy2 itself loads, so both share one allocator
    libs = glob.glob(os.path.join(os.path.dirname(gmpy2_dir), "gmpy2.libs", "libgmp*.so*"))
    if libs:
        return {"extra_link_args": [libs[0], "-Wl,-rpath," + os.path.dirname(libs[0])]}
    return {"libraries": ["gmp"]}


def extensions():
    try:
        import gmpy2
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    gdir = os.path.dirname(gmpy2.__file__)
    ext = Extension(
        "gaussprove._ckernels",
        ["src/gaussprove/_ckernels.pyx"],
        include_dirs=[gdir],
        extra_compile_args=["-O3"],
        **_gmp_link_args(gdir),
    )
    return cythonize([ext], compiler_directives={"language_level": "3"}, include_path=[os.path.dirname(gdir)])


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:
            print(f"warning: compiled kernels not built ({exc}); using pure Python", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: {ext.name} not built ({exc}); using pure Python", file=sys.stderr)


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
