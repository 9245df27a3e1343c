import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    """Drives the CMake build and copies the extension into place."""

    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DSVXGERRY_BUILD_CLI=OFF",
                "-DSVXGERRY_BUILD_TESTS=OFF",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "svxgerry_python", "-j"],
            check=True,
        )

        built = sorted((build_dir / "python_pkg" / "svxgerry").glob("_core*"))
        if not built:
            raise RuntimeError("cmake did not produce the _core extension")
        ext_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        ext_path.parent.mkdir(parents=True, exist_ok=True)
        self.copy_file(str(built[0]), str(ext_path))


setup(
    ext_modules=[CMakeExtension("svxgerry._core")],
    cmdclass={"build_ext": CMakeBuild},
)
