"""Regenerates the public API tree under `cfsm_verify/api`.

Every symbol decorated with `cfsm_verify_export` in `cfsm_verify/src` gets
re-exported from the package path it names. Run via `./shell/api_gen.sh`,
which also formats the generated files.
"""

import os
import shutil

import namex

package = "cfsm_verify"


def ignore_files(_: str, filenames: list[str]) -> list[str]:
    return [f for f in filenames if f.endswith("_test.py")]


def export_version_string(api_init_fname: str) -> None:
    with open(api_init_fname) as f:
        contents = f.read()
    contents += f"from {package}.src.version import __version__\n"
    with open(api_init_fname, "w") as f:
        f.write(contents)


def build() -> None:
    root_path = os.path.dirname(os.path.abspath(__file__))
    code_api_dir = os.path.join(root_path, package, "api")
    build_dir = os.path.join(root_path, "tmp_build_dir")
    if os.path.exists(build_dir):
        shutil.rmtree(build_dir)
    os.mkdir(build_dir)
    shutil.copytree(
        os.path.join(root_path, package),
        os.path.join(build_dir, package),
        ignore=ignore_files,
    )
    build_api_dir = os.path.join(build_dir, package, "api")
    build_init_fname = os.path.join(build_dir, package, "__init__.py")
    try:
        os.chdir(build_dir)
        if os.path.exists(build_api_dir):
            shutil.rmtree(build_api_dir)
        # namex refuses to run over a package that already imports `api`.
        os.remove(build_init_fname)
        os.makedirs(build_api_dir)
        namex.generate_api_files(
            package, code_directory="src", target_directory="api"
        )
        export_version_string(os.path.join(build_api_dir, "__init__.py"))
        if os.path.exists(code_api_dir):
            shutil.rmtree(code_api_dir)
        shutil.copytree(build_api_dir, code_api_dir)
    finally:
        os.chdir(root_path)
        shutil.rmtree(build_dir)


if __name__ == "__main__":
    build()
