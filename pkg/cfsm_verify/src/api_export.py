"""Marks symbols for the generated `cfsm_verify.api` namespace."""

from typing import Any, TypeVar

try:
    import namex
except ImportError:
    namex = None

T = TypeVar("T", bound=Any)

PACKAGE = "cfsm_verify"


class cfsm_verify_export:
    """Decorator recording the public path of a class or function.

    The symbol is returned unchanged. Without `namex` installed the
    decorator is a no-op, so the package imports in a runtime-only
    environment.

    Args:
        path: Dotted public name, e.g. `"cfsm_verify.explore.reach"`.
    """

    def __init__(self, path: str) -> None:
        if not path.startswith(PACKAGE + "."):
            raise ValueError(
                f"`path` must start with `{PACKAGE}.`, received {path}"
            )
        self.path = path
        self._export = (
            namex.export(package=PACKAGE, path=path) if namex else None
        )

    def __call__(self, symbol: T) -> T:
        if self._export is not None:
            self._export(symbol)
        return symbol
