"""CMake-driven build of the _mollify extension for pip installs.

The extension is produced by the repository's CMake project (which also
builds the C++ library and tests); this shim configures a build tree,
compiles only the python module, and drops the resulting shared object
into the wheel's package directory.
"""

import pathlib
import shutil
import subprocess
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = pathlib.Path(__file__).resolve().parent
        build_dir = pathlib.Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DMOLLIFY_BUILD_PYTHON=ON",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_mollify",
             "--parallel"],
            check=True,
        )

        staged = list((build_dir / "python" / "pkg" / "mollify").glob("_mollify*"))
        if not staged:
            raise RuntimeError("CMake build produced no _mollify module")
        dest = pathlib.Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(staged[0], dest)


setup(
    ext_modules=[CMakeExtension("mollify._mollify")],
    cmdclass={"build_ext": CMakeBuild},
)
