"""Builds the pybind11 extension through the project's CMake tree."""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        out_dir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        out_dir.mkdir(parents=True, exist_ok=True)
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)
        cmake_args = [
            f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
            "-DCMAKE_BUILD_TYPE=Release",
            "-DDPP_BUILD_PYTHON=ON",
            "-DDPP_BUILD_CLI=OFF",
            "-DDPP_BUILD_TESTS=OFF",
            f"-DPython_EXECUTABLE={sys.executable}",
        ]
        subprocess.run(
            ["cmake", "-S", str(source_dir), "-B", str(build_dir)] + cmake_args,
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_dppcore",
             "-j", str(os.cpu_count() or 1)],
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("dppsampling._dppcore")],
    cmdclass={"build_ext": CMakeBuild},
)
