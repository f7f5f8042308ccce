from pathlib import Path

import PyInstaller.__main__


def pyinstaller_args(path: str, name: str = "vaesynth") -> list:
    """Arguments for a one-file build of the command line tool."""
    return [
        '--name', name,
        '--hiddenimport=matplotlib.backends.backend_svg',
        '--onefile', path,
    ]


def run_pyinstaller(path: str):
    """
    Build a standalone executable of the vaesynth command line tool.

    :param path: The path to the entry script.
    :return: None

    Example Usage:
    run_pyinstaller('src/vaesynth/__main__.py')
    """
    PyInstaller.__main__.run(pyinstaller_args(path))


if __name__ == "__main__":
    run_pyinstaller(str(Path(__file__).parents[1] / '__main__.py'))
