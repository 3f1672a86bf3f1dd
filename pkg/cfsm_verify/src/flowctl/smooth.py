"""Smooth sets of node subsets and the priority blocks they induce.

For a node set `A`, the negative boundary holds the channels entering `A`
and the positive boundary the channels leaving it. A set `Ψ` of node sets
is smooth if any two members are nested, or are disjoint with the negative
boundary of their union equal to the union of their negative boundaries.
Running the nodes of smaller members first makes every member have an
empty incoming channel in at least one of every two consecutive states.
"""

import dataclasses
import itertools
from typing import Collection, Iterable, Optional, Sequence

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.errors import HypothesisError
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.validation import classify

NodeSet = frozenset[types.NodeId]


@cfsm_verify_export("cfsm_verify.flowctl.Boundary")
@dataclasses.dataclass(frozen=True)
class Boundary:
    """The channels crossing the border of a node set.

    Attributes:
        negative: Channels with their head inside and tail outside.
        positive: Channels with their tail inside and head outside.
    """

    negative: frozenset[types.ChannelId]
    positive: frozenset[types.ChannelId]


@cfsm_verify_export("cfsm_verify.flowctl.SmoothCheck")
@dataclasses.dataclass(frozen=True)
class SmoothCheck:
    holds: bool
    counterexample: Optional[tuple[NodeSet, NodeSet]] = None


def _node_sets(
    protocol: Protocol, psi: Iterable[Collection[types.NodeId]]
) -> list[NodeSet]:
    known = set(protocol.nodes)
    sets = []
    for members in psi:
        node_set = frozenset(members)
        unknown = node_set - known
        if unknown:
            raise ValueError(
                f"Unknown nodes {sorted(unknown)} in a smooth set; the "
                f"protocol has {list(protocol.nodes)}"
            )
        if node_set not in sets:
            sets.append(node_set)
    return sets


@cfsm_verify_export("cfsm_verify.flowctl.boundary")
def boundary(
    protocol: Protocol, nodes: Collection[types.NodeId]
) -> Boundary:
    inside = set(nodes)
    return Boundary(
        negative=frozenset(
            c.name
            for c in protocol.channels
            if c.head in inside and c.tail not in inside
        ),
        positive=frozenset(
            c.name
            for c in protocol.channels
            if c.tail in inside and c.head not in inside
        ),
    )


@cfsm_verify_export("cfsm_verify.flowctl.check_smooth")
def check_smooth(
    protocol: Protocol, psi: Iterable[Collection[types.NodeId]]
) -> SmoothCheck:
    """Checks whether `psi` is smooth in the communication graph.

    Returns:
        The verdict, with the first offending pair of members if any.
    """
    sets = _node_sets(protocol, psi)
    for a, b in itertools.combinations(sets, 2):
        if a <= b or b <= a:
            continue
        if not a & b:
            union = boundary(protocol, a | b).negative
            parts = boundary(protocol, a).negative | (
                boundary(protocol, b).negative
            )
            if union == parts:
                continue
        return SmoothCheck(False, (a, b))
    return SmoothCheck(True)


@cfsm_verify_export("cfsm_verify.flowctl.smooth_schedule")
def smooth_schedule(
    protocol: Protocol, psi: Iterable[Collection[types.NodeId]]
) -> tuple[NodeSet, ...]:
    """The priority blocks of a smooth set, highest priority first.

    Members are ordered so that a subset comes before its supersets; each
    block holds the nodes of a member not in any earlier member. Nodes in
    no member form the last block.

    Raises:
        HypothesisError: if `psi` is not smooth.
    """
    sets = _node_sets(protocol, psi)
    check = check_smooth(protocol, sets)
    if not check.holds:
        a, b = check.counterexample
        raise HypothesisError(
            f"The node sets {sorted(a)} and {sorted(b)} are neither nested "
            "nor disjoint with compatible boundaries"
        )
    order = sorted(sets, key=lambda s: (len(s), sorted(s)))
    blocks = []
    covered: set[types.NodeId] = set()
    for node_set in order:
        block = node_set - covered
        if block:
            blocks.append(frozenset(block))
            covered |= block
    rest = frozenset(protocol.nodes) - covered
    if rest:
        blocks.append(rest)
    return tuple(blocks)


@cfsm_verify_export("cfsm_verify.flowctl.ring_order")
def ring_order(
    protocol: Protocol, channel: types.ChannelId
) -> tuple[types.NodeId, ...]:
    """The nodes of a cyclic protocol, starting at the tail of `channel`.

    Each node is followed by the head of its outgoing channel.

    Raises:
        HypothesisError: if the protocol is not cyclic.
    """
    if not classify(protocol).is_cyclic:
        raise HypothesisError(
            f"Protocol {protocol.name!r} is not cyclic; its communication "
            "graph must be a single directed cycle"
        )
    node = protocol.channel(channel).tail
    order = []
    for _ in protocol.nodes:
        order.append(node)
        (out,) = protocol.out_channels(node)
        node = out.head
    return tuple(order)


@cfsm_verify_export("cfsm_verify.flowctl.cyclic_smooth_set")
def cyclic_smooth_set(
    protocol: Protocol, channel: types.ChannelId
) -> tuple[NodeSet, ...]:
    """The nested smooth set of a ring that singles out `channel`.

    The members grow backwards from the tail of `channel` against the
    direction of the ring, stopping before its head. Each member has
    `channel` as its positive boundary, and the negative boundaries are
    the other channels, one each.
    """
    order = ring_order(protocol, channel)
    backwards = (order[0],) + tuple(reversed(order[2:]))
    return tuple(
        frozenset(backwards[: i + 1]) for i in range(len(backwards))
    )


def negative_boundaries(
    protocol: Protocol, psi: Sequence[Collection[types.NodeId]]
) -> list[frozenset[types.ChannelId]]:
    return [boundary(protocol, members).negative for members in psi]
