"""Script to create (and optionally install) a `.whl` archive for cfsm-verify.

Usage:

1. Create a `.whl` file in `dist/`:

```
python3 pip_build.py
```

2. Also install the new package immediately after:

```
python3 pip_build.py --install
```

3. Build a nightly wheel named `cfsm-verify-nightly`:

```
python3 pip_build.py --nightly
```
"""

import argparse
import datetime
import pathlib
import re
import shutil
import subprocess
import sys

package = "cfsm_verify"
distribution = "cfsm-verify"
build_directory = "tmp_build_dir"
dist_directory = "dist"
to_copy = ["pyproject.toml", "README.md"]


def ignore_files(path: str, filenames: list[str]) -> list[str]:
    # `testing` ships with the wheel so downstream checkers can reuse it.
    if path.endswith("testing"):
        return filenames
    return [f for f in filenames if f.endswith("_test.py")]


def update_version_for_nightly(build_path: pathlib.Path, version: str) -> str:
    """Stamp the version with the build hour and rename the distribution."""
    version += f".dev{datetime.datetime.now():%Y%m%d%H}"
    pyproject = build_path / "pyproject.toml"
    before = pyproject.read_text()
    after = before.replace(
        f'name = "{distribution}"', f'name = "{distribution}-nightly"'
    )
    if before == after:
        raise ValueError("Package name replacement failed")
    pyproject.write_text(after)

    version_py = build_path / package / "src" / "version.py"
    before = version_py.read_text()
    after = re.sub(
        "\n__version__ = .*\n", f'\n__version__ = "{version}"\n', before
    )
    if before == after:
        raise ValueError("Version replacement failed")
    version_py.write_text(after)
    return version


def copy_source_to_build_directory(
    root_path: pathlib.Path, build_path: pathlib.Path
) -> None:
    shutil.copytree(
        root_path / package, build_path / package, ignore=ignore_files
    )
    for fname in to_copy:
        shutil.copy(root_path / fname, build_path / fname)


def build_wheel(
    build_path: pathlib.Path, dist_path: pathlib.Path, version: str
) -> pathlib.Path:
    subprocess.run(
        [sys.executable, "-m", "build"], cwd=build_path, check=True
    )
    dist_path.mkdir(exist_ok=True)
    for fpath in (build_path / dist_directory).glob("*.*"):
        shutil.copy(fpath, dist_path)

    for whl_path in sorted(dist_path.glob(f"*{version}*.whl")):
        print(f"Build successful. Wheel file available at {whl_path}")
        return whl_path
    raise FileNotFoundError("Build failed")


def build(root_path: pathlib.Path, is_nightly: bool) -> pathlib.Path:
    build_path = root_path / build_directory
    if build_path.exists():
        raise ValueError(f"Directory already exists: {build_path}")
    build_path.mkdir()
    try:
        from cfsm_verify.src import version

        cfsm_verify_version = version.__version__
        copy_source_to_build_directory(root_path, build_path)
        if is_nightly:
            cfsm_verify_version = update_version_for_nightly(
                build_path, cfsm_verify_version
            )
        return build_wheel(
            build_path, root_path / dist_directory, cfsm_verify_version
        )
    finally:
        shutil.rmtree(build_path)


def install_whl(whl_fpath: pathlib.Path) -> None:
    print(f"Installing wheel file: {whl_fpath}")
    subprocess.run(
        [
            sys.executable,
            "-m",
            "pip",
            "install",
            str(whl_fpath),
            "--force-reinstall",
            "--no-dependencies",
        ],
        check=True,
    )


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument(
        "--install",
        action="store_true",
        help="Whether to install the generated wheel file.",
    )
    parser.add_argument(
        "--nightly",
        action="store_true",
        help="Whether to generate nightly wheel file.",
    )
    args = parser.parse_args()
    root_path = pathlib.Path(__file__).parent.resolve()
    whl_path = build(root_path, args.nightly)
    if args.install:
        install_whl(whl_path)
