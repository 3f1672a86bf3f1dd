"""Per-channel projections of label sequences, and send/receive cycles.

The projection of a label sequence onto a channel keeps the symbols
exchanged on that channel, in order, and drops the signs. For a pair of
send/receive machines joined by `alpha` and `beta`, the projections of the
home-to-home label sequences of either machine form a set of word pairs;
the machines are affine when both sets are equal.
"""

import dataclasses
from typing import Iterable, Mapping, Sequence

import networkx as nx

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.model.protocol import Action
from cfsm_verify.src.model.protocol import Machine

Cycle = tuple[types.StateName, ...]


@cfsm_verify_export("cfsm_verify.sr.Projection")
@dataclasses.dataclass(frozen=True)
class Projection:
    """A label sequence and its images on every channel it uses.

    Attributes:
        source: The labels.
        per_channel: The projection onto each channel, including channels
            requested explicitly but not used.
    """

    source: tuple[Action, ...]
    per_channel: Mapping[types.ChannelId, types.Word]

    @classmethod
    def of(
        cls, labels: Iterable[Action], channels: Sequence[types.ChannelId] = ()
    ) -> "Projection":
        source = tuple(labels)
        names = list(channels)
        for action in source:
            if action.channel not in names:
                names.append(action.channel)
        return cls(source, {c: project(source, c) for c in names})


@cfsm_verify_export("cfsm_verify.sr.project")
def project(labels: Iterable[Action], channel: types.ChannelId) -> types.Word:
    """The symbols of `labels` exchanged on `channel`, in order."""
    return tuple(a.symbol for a in labels if a.channel == channel)


def _cycles(machine: Machine, keep_send: bool) -> list[Cycle]:
    graph = nx.DiGraph()
    graph.add_nodes_from(machine.states)
    graph.add_edges_from(
        (t.source, t.target)
        for t in machine.transitions
        if t.action.is_send == keep_send
    )
    found = []
    for cycle in nx.simple_cycles(graph):
        # Rotate so the first state is the least; cycles are then unique.
        start = cycle.index(min(cycle))
        found.append(tuple(cycle[start:] + cycle[:start]))
    return sorted(found)


@cfsm_verify_export("cfsm_verify.sr.send_cycles")
def send_cycles(machine: Machine) -> list[Cycle]:
    """The elementary cycles of the diagram whose labels are all sends.

    Each cycle is listed once, as its states starting from the least one.
    A machine with no send cycle sends at most `len(machine.states) - 1`
    times in a row.
    """
    return _cycles(machine, keep_send=True)


@cfsm_verify_export("cfsm_verify.sr.receive_cycles")
def receive_cycles(machine: Machine) -> list[Cycle]:
    """The elementary cycles whose labels are all receptions."""
    return _cycles(machine, keep_send=False)


@cfsm_verify_export("cfsm_verify.sr.cycle_projections")
def cycle_projections(
    machine: Machine, channels: Sequence[types.ChannelId], max_len: int
) -> frozenset[tuple[types.Word, ...]]:
    """The projections of home-to-home label sequences up to a length.

    Args:
        machine: The machine; its initial state is home.
        channels: The channels to project on, in the order of the result
            tuples.
        max_len: The largest number of labels in a sequence.

    Returns:
        One tuple of words per sequence, one word per channel of
        `channels`; the empty sequence contributes the empty words.
    """
    if max_len < 0:
        raise ValueError(f"`max_len` must be nonnegative, received {max_len}")
    position = {c: i for i, c in enumerate(channels)}
    start = (machine.initial, ((),) * len(channels))
    seen = {start}
    frontier = [start]
    for _ in range(max_len):
        following = []
        for state, words in frontier:
            for t in machine.outgoing(state):
                i = position.get(t.action.channel)
                if i is None:
                    extended = words
                else:
                    extended = (
                        words[:i] + (words[i] + (t.action.symbol,),)
                    ) + words[i + 1 :]
                item = (t.target, extended)
                if item not in seen:
                    seen.add(item)
                    following.append(item)
        frontier = following
    return frozenset(w for state, w in seen if state == machine.initial)
