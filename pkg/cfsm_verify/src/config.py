"""Process-wide defaults.

Values are read at call time by the modules that use them, so changing a
setting affects every later operation.
"""

import os
from typing import Optional

from cfsm_verify.src.api_export import cfsm_verify_export

_max_relation_vectors = 10**6
_max_states = 10**6
_max_channel_len: Optional[int] = 64
_max_total_len: Optional[int] = None


@cfsm_verify_export("cfsm_verify.config.set_max_relation_vectors")
def set_max_relation_vectors(value: int) -> None:
    """Sets the cap on the acceptance-set size of recognizable relations."""
    global _max_relation_vectors
    if value <= 0:
        raise ValueError(
            f"`value` must be a positive integer, received {value}"
        )
    _max_relation_vectors = int(value)


@cfsm_verify_export("cfsm_verify.config.max_relation_vectors")
def max_relation_vectors() -> int:
    """Retrieves the cap on the acceptance-set size of relations."""
    return _max_relation_vectors


@cfsm_verify_export("cfsm_verify.config.set_default_budget")
def set_default_budget(
    max_states: int = 10**6,
    max_channel_len: Optional[int] = 64,
    max_total_len: Optional[int] = None,
) -> None:
    """Sets the exploration caps used when no budget is passed explicitly.

    Args:
        max_states: Maximum number of global states to record.
        max_channel_len: Maximum length of any single channel, or `None`.
        max_total_len: Maximum summed length of all channels, or `None`.
    """
    global _max_states, _max_channel_len, _max_total_len
    for name, cap in (
        ("max_states", max_states),
        ("max_channel_len", max_channel_len),
        ("max_total_len", max_total_len),
    ):
        if cap is not None and cap < 0:
            raise ValueError(f"`{name}` must be nonnegative, received {cap}")
    if max_states == 0:
        raise ValueError("`max_states` must be positive")
    _max_states = max_states
    _max_channel_len = max_channel_len
    _max_total_len = max_total_len


@cfsm_verify_export("cfsm_verify.config.default_budget")
def default_budget() -> tuple[int, Optional[int], Optional[int]]:
    """Retrieves `(max_states, max_channel_len, max_total_len)`."""
    return _max_states, _max_channel_len, _max_total_len


@cfsm_verify_export("cfsm_verify.config.color_enabled")
def color_enabled() -> bool:
    """Whether terminal styling is on; `CFSM_COLOR=0` turns it off."""
    return os.environ.get("CFSM_COLOR", "1") != "0"
