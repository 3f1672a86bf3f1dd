"""Verification of protocols built from communicating finite-state machines.

The public API lives in the generated `api` tree; `src` holds the
implementation and is not part of it.
"""

import os

from cfsm_verify.api import *  # noqa: F403
from cfsm_verify.src.version import __version__

# Subpackages of `api` become importable as `cfsm_verify.<name>`.
__path__.append(os.path.join(os.path.dirname(__file__), "api"))  # noqa: F405

del os


def __dir__() -> list[str]:
    return [name for name in globals() if name not in ("src", "api")]


__all__ = [
    name
    for name in globals()
    if not (name.startswith("_") or name in ("src", "api"))
]
