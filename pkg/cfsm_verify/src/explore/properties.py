"""Reachability properties read off an explored state graph.

Every query reports whether its answer is definitive. An answer that only
needs one witness state (a deadlock found, a half-duplex violation) is
definitive as soon as the witness is recorded; an answer about all
reachable states needs an exhausted graph.
"""

import dataclasses
from typing import Generic, Optional, TypeVar

import networkx as nx

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.explore.state_space import Budget
from cfsm_verify.src.explore.state_space import GlobalState
from cfsm_verify.src.explore.state_space import StateGraph
from cfsm_verify.src.explore.state_space import reach
from cfsm_verify.src.explore.state_space import successors
from cfsm_verify.src.model.protocol import Protocol

T = TypeVar("T")

BLOCKED = "blocked"
FREE = "free"
UNKNOWN = "unknown"

# `(node, local state, symbol)`: `symbol` can arrive at the local state.
Reception = tuple[types.NodeId, types.StateName, types.Symbol]


@cfsm_verify_export("cfsm_verify.explore.Result")
@dataclasses.dataclass(frozen=True)
class Result(Generic[T]):
    """A query answer and whether it holds for the whole state space."""

    value: T
    definitive: bool


@cfsm_verify_export("cfsm_verify.explore.Verdict")
@dataclasses.dataclass(frozen=True)
class Verdict:
    """A yes/no/unknown answer with the states or items that decide it.

    Attributes:
        holds: `True`, `False`, or `None` when undetermined.
        witnesses: Counterexamples when `holds` is `False`, otherwise
            whatever supports the answer.
    """

    holds: Optional[bool]
    witnesses: tuple[object, ...] = ()


@cfsm_verify_export("cfsm_verify.explore.ChannelStatus")
@dataclasses.dataclass(frozen=True, order=True)
class ChannelStatus:
    state: int
    channel: types.ChannelId
    verdict: str


def is_deadlocked(protocol: Protocol, state: GlobalState) -> bool:
    """Every local state is a receive state and all channels are empty."""
    return state.channels_empty and all(
        protocol.machine(node).is_receive_state(local)
        for node, local in zip(protocol.nodes, state.composite)
    )


@cfsm_verify_export("cfsm_verify.explore.stable_states")
def stable_states(sg: StateGraph) -> Result[frozenset[types.CompositeState]]:
    """Composite states recorded with all channels empty."""
    stable = frozenset(s.composite for s in sg.states if s.channels_empty)
    return Result(stable, sg.exhausted)


@cfsm_verify_export("cfsm_verify.explore.deadlocks")
def deadlocks(sg: StateGraph) -> Result[tuple[GlobalState, ...]]:
    """The recorded deadlocked states.

    A nonempty answer is definitive; an empty one only if `sg` is
    exhausted.
    """
    found = tuple(s for s in sg.states if is_deadlocked(sg.protocol, s))
    return Result(found, bool(found) or sg.exhausted)


@cfsm_verify_export("cfsm_verify.explore.globally_blocked")
def globally_blocked(sg: StateGraph) -> Result[tuple[GlobalState, ...]]:
    """Recorded states without any successor, deadlocked or not."""
    found = tuple(s for s in sg.states if not successors(sg.protocol, s))
    return Result(found, bool(found) or sg.exhausted)


@cfsm_verify_export("cfsm_verify.explore.executable_receptions")
def executable_receptions(sg: StateGraph) -> Result[frozenset[Reception]]:
    """Pairs of a local state and a symbol that can arrive at it.

    A symbol arrives at the local state of node `+ch` when it is at the
    head of `ch`, whether or not the state has a matching reception.
    """
    protocol = sg.protocol
    heads = []
    for channel in protocol.channels:
        heads.append(
            (
                protocol.node_index(channel.head),
                channel.head,
                protocol.channel_index(channel.name),
            )
        )
    found = set()
    for state in sg.states:
        for i, node, c in heads:
            word = state.contents[c]
            if word:
                found.add((node, state.composite[i], word[0]))
    return Result(frozenset(found), sg.exhausted)


def _receptions_in_diagrams(protocol: Protocol) -> set[Reception]:
    return {
        (machine.node, t.source, t.action.symbol)
        for machine in protocol.machines
        for t in machine.transitions
        if t.action.is_receive
    }


@cfsm_verify_export("cfsm_verify.explore.well_formed")
def well_formed(sg: StateGraph) -> Verdict:
    """Whether arrivals and receptions in the diagrams coincide.

    A symbol that arrives at a state without a matching reception refutes
    the property at once. A reception that never gets its symbol is a
    useless edge, which refutes it only when `sg` is exhausted.

    Returns:
        A verdict whose witnesses are `("unspecified", reception)` and
        `("useless", reception)` pairs.
    """
    arrivals = executable_receptions(sg).value
    specified = _receptions_in_diagrams(sg.protocol)
    unspecified = sorted(arrivals - specified)
    useless = sorted(specified - arrivals)
    witnesses = tuple(("unspecified", r) for r in unspecified) + tuple(
        ("useless", r) for r in useless
    )
    if unspecified:
        return Verdict(False, witnesses)
    if not sg.exhausted:
        return Verdict(None, witnesses)
    return Verdict(not useless, witnesses)


def _receiving_states(sg: StateGraph, channel: types.ChannelId) -> set[int]:
    """States with a recorded path to a reception on `channel`."""
    graph = sg.graph
    sources = {
        e.source
        for e in sg.edges
        if e.action.is_receive and e.action.channel == channel
    }
    closure = set(sources)
    for source in sources:
        closure |= nx.ancestors(graph, source)
    return closure


@cfsm_verify_export("cfsm_verify.explore.blocked_channels")
def blocked_channels(
    sg: StateGraph, budget: Optional[Budget] = None
) -> list[ChannelStatus]:
    """Whether the pending messages of every recorded state get received.

    A state is blocked on a nonempty channel if no state reachable from it
    receives from that channel. FIFO order makes the first such reception
    consume the current head.

    Args:
        sg: The explored graph.
        budget: The budget for fresh searches from states whose answer
            `sg` does not settle; defaults to `Budget.default()`.

    Returns:
        One status per recorded state and nonempty channel, sorted.
    """
    protocol = sg.protocol
    found = []
    for c, channel in enumerate(protocol.channel_names):
        nonempty = [i for i, s in enumerate(sg.states) if s.contents[c]]
        if not nonempty:
            continue
        free = _receiving_states(sg, channel)
        for i in nonempty:
            if i in free:
                verdict = FREE
            elif sg.exhausted:
                verdict = BLOCKED
            else:
                verdict = _search_reception(sg, i, channel, budget)
            found.append(ChannelStatus(i, channel, verdict))
    return sorted(found)


def _search_reception(
    sg: StateGraph,
    index: int,
    channel: types.ChannelId,
    budget: Optional[Budget],
) -> str:
    local = reach(sg.protocol, budget, initial=sg.states[index])
    if any(
        e.action.is_receive and e.action.channel == channel
        for e in local.edges
    ):
        return FREE
    return BLOCKED if local.exhausted else UNKNOWN


def _two_cycle(protocol: Protocol) -> tuple[int, int]:
    if len(protocol.nodes) != 2 or len(protocol.channels) != 2:
        raise ValueError(
            "The half-duplex property needs two nodes joined by one channel "
            f"each way; {protocol.name!r} has nodes {protocol.nodes} and "
            f"channels {protocol.channel_names}"
        )
    first, second = protocol.channels
    if (first.tail, first.head) != (second.head, second.tail) or (
        first.tail == first.head
    ):
        raise ValueError(
            f"Channels of {protocol.name!r} do not run in opposite "
            "directions"
        )
    return 0, 1


@cfsm_verify_export("cfsm_verify.explore.half_duplex")
def half_duplex(sg: StateGraph) -> Verdict:
    """Whether one of the two channels is empty in every state.

    Raises:
        ValueError: if the protocol is not two nodes joined both ways.
    """
    a, b = _two_cycle(sg.protocol)
    both = tuple(
        i for i, s in enumerate(sg.states) if s.contents[a] and s.contents[b]
    )
    if both:
        return Verdict(False, both[:1])
    return Verdict(True if sg.exhausted else None)


@cfsm_verify_export("cfsm_verify.explore.bounded_channels")
def bounded_channels(sg: StateGraph) -> Result[Optional[int]]:
    """The largest total channel length, if `sg` is exhausted.

    The state space is finite iff the total length is bounded, so an
    exhausted exploration proves the bound. Otherwise the value is `None`.
    """
    if not sg.exhausted:
        return Result(None, False)
    return Result(max(s.total_length for s in sg.states), True)


@cfsm_verify_export("cfsm_verify.explore.reachable_contents")
def reachable_contents(
    sg: StateGraph, composite: types.CompositeState
) -> Result[frozenset[types.Contents]]:
    """The recorded channel contents at one composite state."""
    found = frozenset(
        s.contents for s in sg.states if s.composite == tuple(composite)
    )
    return Result(found, sg.exhausted)

