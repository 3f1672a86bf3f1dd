"""The protocol data model: channels, machines and protocols.

A protocol is a directed communication graph whose edges are FIFO channels,
a message alphabet per channel, and one finite state machine per node. A
machine may send (`-b`) on channels leaving its node and receive (`+b`) on
channels entering it.
"""

import dataclasses
import functools
import itertools
from typing import Iterable, Mapping, Optional, Sequence

import networkx as nx

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export

SEND = "-"
RECEIVE = "+"


@cfsm_verify_export("cfsm_verify.model.Channel")
@dataclasses.dataclass(frozen=True)
class Channel:
    """A FIFO channel from node `tail` to node `head`."""

    name: types.ChannelId
    tail: types.NodeId
    head: types.NodeId


@cfsm_verify_export("cfsm_verify.model.Action")
@dataclasses.dataclass(frozen=True, order=True)
class Action:
    """Sending or receiving one symbol on one channel.

    Written `-sym@channel` for a send and `+sym@channel` for a reception.
    """

    sign: str
    symbol: types.Symbol
    channel: types.ChannelId

    def __post_init__(self) -> None:
        if self.sign not in (SEND, RECEIVE):
            raise ValueError(
                f"`sign` must be '{SEND}' or '{RECEIVE}', received "
                f"{self.sign!r}"
            )

    @property
    def is_send(self) -> bool:
        return self.sign == SEND

    @property
    def is_receive(self) -> bool:
        return self.sign == RECEIVE

    def mirrored(self) -> "Action":
        """The same symbol and channel with the opposite direction."""
        return Action(
            RECEIVE if self.is_send else SEND, self.symbol, self.channel
        )

    def __str__(self) -> str:
        return f"{self.sign}{self.symbol}@{self.channel}"

    @classmethod
    def parse(cls, text: str) -> "Action":
        """Reads `-sym@channel` or `+sym@channel`."""
        text = text.strip()
        sign, rest = text[:1], text[1:]
        symbol, at, channel = rest.partition("@")
        if sign not in (SEND, RECEIVE) or not at or not symbol or not channel:
            raise ValueError(
                f"Expected an action like '-sym@channel', received {text!r}"
            )
        return cls(sign, symbol, channel)


def send(symbol: types.Symbol, channel: types.ChannelId) -> Action:
    return Action(SEND, symbol, channel)


def receive(symbol: types.Symbol, channel: types.ChannelId) -> Action:
    return Action(RECEIVE, symbol, channel)


@cfsm_verify_export("cfsm_verify.model.Transition")
@dataclasses.dataclass(frozen=True, order=True)
class Transition:
    source: types.StateName
    action: Action
    target: types.StateName

    def __str__(self) -> str:
        return f"{self.source} {self.action} {self.target}"


@cfsm_verify_export("cfsm_verify.model.Machine")
@dataclasses.dataclass(frozen=True, eq=False)
class Machine:
    """The finite state machine of one node.

    Args:
        node: The node the machine runs on.
        initial: The initial (home) state.
        transitions: The transition relation.
        states: Additional states without transitions. The state set is the
            initial state, then `states`, then every state a transition
            mentions, in order of first appearance.
    """

    node: types.NodeId
    initial: types.StateName
    transitions: tuple[Transition, ...]
    states: tuple[types.StateName, ...] = ()

    def __post_init__(self) -> None:
        transitions = tuple(self.transitions)
        names = [self.initial, *self.states]
        for t in transitions:
            names.extend((t.source, t.target))
        object.__setattr__(self, "transitions", transitions)
        object.__setattr__(self, "states", tuple(dict.fromkeys(names)))

    def __repr__(self) -> str:
        return (
            f"Machine(node={self.node!r}, initial={self.initial!r}, "
            f"states={len(self.states)}, "
            f"transitions={len(self.transitions)})"
        )

    @functools.cached_property
    def _outgoing(self) -> dict[types.StateName, tuple[Transition, ...]]:
        grouped: dict[types.StateName, list[Transition]] = {
            s: [] for s in self.states
        }
        for t in self.transitions:
            grouped[t.source].append(t)
        return {s: tuple(ts) for s, ts in grouped.items()}

    def outgoing(self, state: types.StateName) -> tuple[Transition, ...]:
        """The transitions leaving `state`, in declaration order."""
        return self._outgoing.get(state, ())

    def is_send_state(self, state: types.StateName) -> bool:
        """Has no outgoing receptions; states without transitions count."""
        return not any(t.action.is_receive for t in self.outgoing(state))

    def is_receive_state(self, state: types.StateName) -> bool:
        """Has no outgoing sends; states without transitions count."""
        return not any(t.action.is_send for t in self.outgoing(state))

    def is_mixed_state(self, state: types.StateName) -> bool:
        out = self.outgoing(state)
        return any(t.action.is_send for t in out) and any(
            t.action.is_receive for t in out
        )

    @property
    def receive_states(self) -> tuple[types.StateName, ...]:
        return tuple(s for s in self.states if self.is_receive_state(s))

    @property
    def send_states(self) -> tuple[types.StateName, ...]:
        return tuple(s for s in self.states if self.is_send_state(s))

    @functools.cached_property
    def graph(self) -> nx.MultiDiGraph:
        """The transition diagram; edge keys are the actions."""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.states)
        for t in self.transitions:
            graph.add_edge(t.source, t.target, key=t.action, action=t.action)
        return graph

    def reachable_states(self) -> set[types.StateName]:
        """States reachable from the initial state in the diagram alone."""
        return {self.initial} | nx.descendants(self.graph, self.initial)


@cfsm_verify_export("cfsm_verify.model.Protocol")
@dataclasses.dataclass(frozen=True, eq=False)
class Protocol:
    """A protocol of communicating finite state machines.

    Node, channel and machine order is the declaration order; composite
    states and channel contents are tuples in that order.

    Args:
        name: A display name.
        nodes: The node ids.
        channels: The channels.
        alphabets: The message alphabet of every channel.
        machines: One machine per node.

    Example:

    ```python
    protocol = Protocol(
        name="counter",
        nodes=("0", "1"),
        channels=(Channel("d", "0", "1"), Channel("b", "0", "1")),
        alphabets={"d": ("d",), "b": ("b",)},
        machines=(
            Machine("0", "00", (
                Transition("00", send("d", "d"), "01"),
                Transition("01", send("b", "b"), "00"),
            )),
            Machine("1", "10", (
                Transition("10", receive("d", "d"), "11"),
                Transition("11", receive("b", "b"), "10"),
            )),
        ),
    )
    ```
    """

    name: str
    nodes: tuple[types.NodeId, ...]
    channels: tuple[Channel, ...]
    alphabets: Mapping[types.ChannelId, tuple[types.Symbol, ...]]
    machines: tuple[Machine, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "machines", tuple(self.machines))
        object.__setattr__(
            self,
            "alphabets",
            {
                ch: tuple(sorted(set(symbols)))
                for ch, symbols in self.alphabets.items()
            },
        )

    def __repr__(self) -> str:
        return (
            f"Protocol(name={self.name!r}, nodes={self.nodes}, "
            f"channels={self.channel_names})"
        )

    @functools.cached_property
    def channel_names(self) -> tuple[types.ChannelId, ...]:
        return tuple(c.name for c in self.channels)

    @functools.cached_property
    def _channel_index(self) -> dict[types.ChannelId, int]:
        return {name: i for i, name in enumerate(self.channel_names)}

    @functools.cached_property
    def _node_index(self) -> dict[types.NodeId, int]:
        return {node: i for i, node in enumerate(self.nodes)}

    @functools.cached_property
    def _machine_of(self) -> dict[types.NodeId, Machine]:
        return {m.node: m for m in self.machines}

    def channel(self, name: types.ChannelId) -> Channel:
        return self.channels[self.channel_index(name)]

    def channel_index(self, name: types.ChannelId) -> int:
        if name not in self._channel_index:
            raise ValueError(
                f"Unknown channel {name!r}; the protocol has "
                f"{list(self.channel_names)}"
            )
        return self._channel_index[name]

    def node_index(self, node: types.NodeId) -> int:
        if node not in self._node_index:
            raise ValueError(
                f"Unknown node {node!r}; the protocol has {list(self.nodes)}"
            )
        return self._node_index[node]

    def machine(self, node: types.NodeId) -> Machine:
        if node not in self._machine_of:
            raise ValueError(f"Node {node!r} has no machine")
        return self._machine_of[node]

    def alphabet(self, channel: types.ChannelId) -> tuple[types.Symbol, ...]:
        return self.alphabets.get(channel, ())

    @property
    def channel_alphabets(self) -> tuple[tuple[types.Symbol, ...], ...]:
        """The alphabets in channel order."""
        return tuple(self.alphabet(c) for c in self.channel_names)

    @property
    def initial_composite(self) -> types.CompositeState:
        return tuple(self.machine(node).initial for node in self.nodes)

    def in_channels(self, node: types.NodeId) -> tuple[Channel, ...]:
        return tuple(c for c in self.channels if c.head == node)

    def out_channels(self, node: types.NodeId) -> tuple[Channel, ...]:
        return tuple(c for c in self.channels if c.tail == node)

    @functools.cached_property
    def comm_graph(self) -> nx.MultiDiGraph:
        """The communication graph; edge keys are channel names."""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.nodes)
        for c in self.channels:
            graph.add_edge(c.tail, c.head, key=c.name)
        return graph

    def composite_states(self) -> Iterable[types.CompositeState]:
        """Every composite state, in lexicographic declaration order."""
        return itertools.product(
            *(self.machine(node).states for node in self.nodes)
        )

    def format_composite(self, composite: types.CompositeState) -> str:
        return ",".join(composite)

    def replace_machines(
        self,
        machines: Sequence[Machine],
        name: Optional[str] = None,
        alphabets: Optional[
            Mapping[types.ChannelId, Iterable[types.Symbol]]
        ] = None,
    ) -> "Protocol":
        """A copy with new machines and, optionally, new alphabets."""
        return Protocol(
            name=self.name if name is None else name,
            nodes=self.nodes,
            channels=self.channels,
            alphabets=self.alphabets if alphabets is None else alphabets,
            machines=tuple(machines),
        )
