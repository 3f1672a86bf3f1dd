import collections
import dataclasses

import networkx as nx
from absl import logging

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.lang import regex
from cfsm_verify.src.model.protocol import Machine
from cfsm_verify.src.model.protocol import Protocol


@cfsm_verify_export("cfsm_verify.model.Diagnostic")
@dataclasses.dataclass(frozen=True, order=True)
class Diagnostic:
    """One violated well-formedness condition.

    Attributes:
        code: A stable short identifier such as `alphabet-overlap`.
        element: The offending node, channel, symbol or transition.
        message: A human readable explanation.
    """

    code: str
    element: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@cfsm_verify_export("cfsm_verify.model.Classification")
@dataclasses.dataclass(frozen=True)
class Classification:
    is_cyclic: bool
    is_sr_pair: bool
    node_in_degrees: dict[types.NodeId, int]


@cfsm_verify_export("cfsm_verify.model.SrReport")
@dataclasses.dataclass(frozen=True)
class SrReport:
    """Violations of the send/receive machine conditions.

    Attributes:
        mixed_states: States with both outgoing sends and receptions.
        nondet_labels: `(state, action)` pairs with several targets.
        strongly_connected: Whether the transition diagram is strongly
            connected.
    """

    mixed_states: tuple[types.StateName, ...]
    nondet_labels: tuple[tuple[types.StateName, str], ...]
    strongly_connected: bool

    @property
    def passes(self) -> bool:
        return (
            not self.mixed_states
            and not self.nondet_labels
            and self.strongly_connected
        )


def _check_graph(protocol: Protocol) -> list[Diagnostic]:
    found = []
    nodes = set(protocol.nodes)
    for node, count in collections.Counter(protocol.nodes).items():
        if count > 1:
            found.append(
                Diagnostic(
                    "duplicate-node",
                    node,
                    f"node {node} declared {count} times",
                )
            )
    for name, count in collections.Counter(protocol.channel_names).items():
        if count > 1:
            found.append(
                Diagnostic(
                    "duplicate-channel",
                    name,
                    f"channel {name} declared {count} times",
                )
            )
    for channel in protocol.channels:
        for end in (channel.tail, channel.head):
            if end not in nodes:
                found.append(
                    Diagnostic(
                        "unknown-node",
                        channel.name,
                        f"channel {channel.name} refers to unknown node {end}",
                    )
                )
        if channel.tail == channel.head:
            found.append(
                Diagnostic(
                    "self-loop-channel",
                    channel.name,
                    f"channel {channel.name} runs from node {channel.tail} "
                    "to itself",
                )
            )
    return found


def _check_alphabets(protocol: Protocol) -> list[Diagnostic]:
    found = []
    owner: dict[types.Symbol, list[types.ChannelId]] = collections.defaultdict(
        list
    )
    for channel in protocol.channel_names:
        if not protocol.alphabet(channel):
            found.append(
                Diagnostic(
                    "empty-alphabet",
                    channel,
                    f"channel {channel} has no alphabet",
                )
            )
        for symbol in protocol.alphabet(channel):
            owner[symbol].append(channel)
            if not regex.is_identifier(symbol):
                found.append(
                    Diagnostic(
                        "bad-symbol",
                        symbol,
                        f"symbol {symbol!r} on channel {channel} cannot be "
                        "written in expressions",
                    )
                )
    for symbol, channels in sorted(owner.items()):
        if len(channels) > 1:
            found.append(
                Diagnostic(
                    "alphabet-overlap",
                    symbol,
                    f"alphabets not disjoint: symbol {symbol} is on channels "
                    f"{', '.join(channels)}",
                )
            )
    extra = set(protocol.alphabets) - set(protocol.channel_names)
    for channel in sorted(extra):
        found.append(
            Diagnostic(
                "unknown-channel",
                channel,
                f"alphabet declared for unknown channel {channel}",
            )
        )
    return found


def _check_machine(protocol: Protocol, machine: Machine) -> list[Diagnostic]:
    found = []
    known = {c.name: c for c in protocol.channels}
    for t in machine.transitions:
        element = f"{machine.node}:{t}"
        channel = known.get(t.action.channel)
        if channel is None:
            found.append(
                Diagnostic(
                    "unknown-channel",
                    element,
                    f"node {machine.node} transition {t} uses unknown "
                    f"channel {t.action.channel}",
                )
            )
            continue
        if t.action.symbol not in protocol.alphabet(channel.name):
            found.append(
                Diagnostic(
                    "symbol-not-in-alphabet",
                    element,
                    f"node {machine.node} transition {t} uses symbol "
                    f"{t.action.symbol} outside the alphabet of channel "
                    f"{channel.name}",
                )
            )
        if t.action.is_send and channel.tail != machine.node:
            found.append(
                Diagnostic(
                    "send-wrong-tail",
                    element,
                    f"node {machine.node} sends on channel {channel.name} "
                    f"whose tail is node {channel.tail}",
                )
            )
        if t.action.is_receive and channel.head != machine.node:
            found.append(
                Diagnostic(
                    "receive-wrong-head",
                    element,
                    f"node {machine.node} receives on channel {channel.name} "
                    f"whose head is node {channel.head}",
                )
            )
    reachable = machine.reachable_states()
    unreachable = [s for s in machine.states if s not in reachable]
    if unreachable:
        logging.warning(
            "Node %s has states unreachable in its transition diagram: %s",
            machine.node,
            ", ".join(unreachable),
        )
    return found


@cfsm_verify_export("cfsm_verify.model.validate")
def validate(protocol: Protocol) -> list[Diagnostic]:
    """Checks the well-formedness conditions of a protocol.

    States unreachable within their own transition diagram are allowed and
    only logged as warnings.

    Args:
        protocol: The protocol to check.

    Returns:
        The sorted diagnostics; empty iff the protocol is well formed.
    """
    found = _check_graph(protocol) + _check_alphabets(protocol)
    nodes_with_machines: collections.Counter[types.NodeId] = (
        collections.Counter(m.node for m in protocol.machines)
    )
    for node in protocol.nodes:
        if nodes_with_machines[node] == 0:
            found.append(
                Diagnostic(
                    "missing-machine", node, f"node {node} has no machine"
                )
            )
        elif nodes_with_machines[node] > 1:
            found.append(
                Diagnostic(
                    "duplicate-machine",
                    node,
                    f"node {node} has {nodes_with_machines[node]} machines",
                )
            )
    for machine in protocol.machines:
        if machine.node not in protocol.nodes:
            found.append(
                Diagnostic(
                    "unknown-node",
                    machine.node,
                    f"machine declared for unknown node {machine.node}",
                )
            )
            continue
        found.extend(_check_machine(protocol, machine))
    return sorted(set(found))


@cfsm_verify_export("cfsm_verify.model.sr_checks")
def sr_checks(machine: Machine) -> SrReport:
    """Checks the three conditions of a send/receive machine."""
    mixed = tuple(s for s in machine.states if machine.is_mixed_state(s))
    targets: dict[tuple[str, str], set[str]] = collections.defaultdict(set)
    for t in machine.transitions:
        targets[(t.source, str(t.action))].add(t.target)
    nondet = tuple(
        sorted(key for key, found in targets.items() if len(found) > 1)
    )
    return SrReport(
        mixed_states=mixed,
        nondet_labels=nondet,
        strongly_connected=nx.is_strongly_connected(machine.graph),
    )


def _is_cyclic(protocol: Protocol) -> bool:
    graph = protocol.comm_graph
    if len(protocol.nodes) < 2 or len(protocol.channels) != len(
        protocol.nodes
    ):
        return False
    return all(
        graph.in_degree(n) == 1 and graph.out_degree(n) == 1
        for n in protocol.nodes
    ) and nx.is_strongly_connected(graph)


@cfsm_verify_export("cfsm_verify.model.classify")
def classify(protocol: Protocol) -> Classification:
    """Structural classification of a validated protocol.

    A protocol is cyclic iff its communication graph is a single directed
    cycle through all nodes; two nodes joined by one channel each way form
    a cycle of length two. It is a pair of send/receive machines iff it is
    such a two-cycle and both machines pass `sr_checks`.
    """
    cyclic = _is_cyclic(protocol)
    sr_pair = (
        cyclic
        and len(protocol.nodes) == 2
        and all(sr_checks(m).passes for m in protocol.machines)
    )
    in_degrees = {n: protocol.comm_graph.in_degree(n) for n in protocol.nodes}
    return Classification(
        is_cyclic=cyclic, is_sr_pair=sr_pair, node_in_degrees=in_degrees
    )


def sr_pair_channels(
    protocol: Protocol,
) -> tuple[types.ChannelId, types.ChannelId]:
    """The channels `(alpha, beta)` of a pair, `alpha` leaving node 0.

    Raises:
        ValueError: if `protocol` is not a pair of send/receive machines.
    """
    report = classify(protocol)
    if not report.is_sr_pair:
        raise ValueError(
            f"Protocol {protocol.name!r} is not a pair of communicating "
            "send/receive machines"
        )
    (alpha,) = protocol.out_channels(protocol.nodes[0])
    (beta,) = protocol.in_channels(protocol.nodes[0])
    return alpha.name, beta.name
