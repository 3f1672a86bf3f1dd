"""The global state space of a protocol, explored breadth first.

A global state is a composite state plus the contents of every channel. A
send appends to the tail of its channel, a reception consumes the head
symbol when it matches. Every exploration runs under a `Budget`, since the
state space can be infinite; whether the frontier emptied is recorded as
`StateGraph.exhausted`.
"""

import collections
import dataclasses
import functools
from typing import Callable, Iterable, Mapping, Optional, Sequence

import networkx as nx
from absl import logging

from cfsm_verify.src import config
from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.model.protocol import Action
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.protocol import Transition


@cfsm_verify_export("cfsm_verify.explore.GlobalState")
@dataclasses.dataclass(frozen=True, order=True)
class GlobalState:
    """A composite state and the channel contents, both in declaration order.

    Attributes:
        composite: One local state per node.
        contents: One word per channel; the head is the first symbol.
    """

    composite: types.CompositeState
    contents: types.Contents

    @property
    def channels_empty(self) -> bool:
        return not any(self.contents)

    @property
    def total_length(self) -> int:
        return sum(len(w) for w in self.contents)

    def format(self, protocol: Protocol) -> str:
        words = [" ".join(w) if w else "eps" for w in self.contents]
        return f"({','.join(self.composite)}) [{' | '.join(words)}]"


@cfsm_verify_export("cfsm_verify.explore.initial_state")
def initial_state(protocol: Protocol) -> GlobalState:
    return GlobalState(
        protocol.initial_composite, ((),) * len(protocol.channels)
    )


@cfsm_verify_export("cfsm_verify.explore.Budget")
@dataclasses.dataclass(frozen=True)
class Budget:
    """Caps on an exploration.

    Args:
        max_states: Maximum number of global states recorded.
        max_channel_len: Maximum length of any single channel, or `None`.
        max_total_len: Maximum total length of all channels, or `None`.
    """

    max_states: int = 10**6
    max_channel_len: types.LengthCap = 64
    max_total_len: types.LengthCap = None

    def __post_init__(self) -> None:
        if self.max_states <= 0:
            raise ValueError(
                f"`max_states` must be positive, received {self.max_states}"
            )
        for name in ("max_channel_len", "max_total_len"):
            cap = getattr(self, name)
            if cap is not None and cap < 0:
                raise ValueError(
                    f"`{name}` must be nonnegative, received {cap}"
                )

    @classmethod
    def default(cls) -> "Budget":
        """The budget set with `cfsm_verify.config.set_default_budget`."""
        return cls(*config.default_budget())

    def admits(self, state: GlobalState) -> bool:
        """Whether `state` is within the length caps."""
        if self.max_channel_len is not None and any(
            len(w) > self.max_channel_len for w in state.contents
        ):
            return False
        return self.max_total_len is None or (
            state.total_length <= self.max_total_len
        )


@cfsm_verify_export("cfsm_verify.explore.Edge")
@dataclasses.dataclass(frozen=True, order=True)
class Edge:
    """A transition `source -> target` taken by the machine at `node`."""

    source: int
    node: types.NodeId
    action: Action
    target: int


@cfsm_verify_export("cfsm_verify.explore.StateGraph")
class StateGraph:
    """An explored part of the global state space.

    States are numbered in discovery order; the initial state is `0`.

    Attributes:
        protocol: The protocol explored.
        states: The recorded global states.
        edges: The recorded transitions, in discovery order.
        exhausted: Whether every successor of every recorded state was
            recorded too, except those excluded by a filter. With a filter
            this covers the filtered space only; verdicts about the whole
            protocol carry over only where the filter is known to preserve
            them, as a cyclic schedule does for empty-channel states.
    """

    def __init__(
        self,
        protocol: Protocol,
        states: Sequence[GlobalState],
        edges: Sequence[Edge],
        exhausted: bool,
    ) -> None:
        self.protocol = protocol
        self.states = tuple(states)
        self.edges = tuple(edges)
        self.exhausted = exhausted
        self.index = {state: i for i, state in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    def __repr__(self) -> str:
        return (
            f"StateGraph(protocol={self.protocol.name!r}, "
            f"states={len(self.states)}, edges={len(self.edges)}, "
            f"exhausted={self.exhausted})"
        )

    @property
    def initial(self) -> GlobalState:
        return self.states[0]

    @functools.cached_property
    def _outgoing(self) -> tuple[tuple[Edge, ...], ...]:
        grouped: list[list[Edge]] = [[] for _ in self.states]
        for edge in self.edges:
            grouped[edge.source].append(edge)
        return tuple(tuple(g) for g in grouped)

    def outgoing(self, index: int) -> tuple[Edge, ...]:
        return self._outgoing[index]

    @functools.cached_property
    def graph(self) -> nx.MultiDiGraph:
        """The state graph; nodes are state indices, edges carry actions."""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(range(len(self.states)))
        for edge in self.edges:
            graph.add_edge(
                edge.source,
                edge.target,
                key=(edge.node, edge.action),
                node=edge.node,
                action=edge.action,
            )
        return graph

    def contents_by_composite(
        self,
    ) -> dict[types.CompositeState, set[types.Contents]]:
        """The recorded channel contents of every composite state."""
        grouped: dict[types.CompositeState, set[types.Contents]] = (
            collections.defaultdict(set)
        )
        for state in self.states:
            grouped[state.composite].add(state.contents)
        return dict(grouped)

    def path_to(self, index: int) -> list[Edge]:
        """A shortest recorded path from the initial state to `index`."""
        parents: dict[int, Optional[Edge]] = {0: None}
        queue = collections.deque([0])
        while queue and index not in parents:
            current = queue.popleft()
            for edge in self.outgoing(current):
                if edge.target not in parents:
                    parents[edge.target] = edge
                    queue.append(edge.target)
        if index not in parents:
            raise ValueError(f"State {index} is not reachable in the graph")
        path = []
        edge = parents[index]
        while edge is not None:
            path.append(edge)
            edge = parents[edge.source]
        return path[::-1]


@cfsm_verify_export("cfsm_verify.explore.successors")
def successors(
    protocol: Protocol,
    state: GlobalState,
    nodes: Optional[Iterable[types.NodeId]] = None,
) -> list[tuple[types.NodeId, Action, GlobalState]]:
    """The one-step successors of `state`.

    Args:
        protocol: The protocol.
        state: The global state to expand.
        nodes: Only moves of these nodes; defaults to every node.

    Returns:
        `(node, action, successor)` triples, by node then transition in
        declaration order.
    """
    allowed = None if nodes is None else set(nodes)
    result = []
    for i, node in enumerate(protocol.nodes):
        if allowed is not None and node not in allowed:
            continue
        local = state.composite[i]
        for t in protocol.machine(node).outgoing(local):
            c = protocol.channel_index(t.action.channel)
            word = state.contents[c]
            if t.action.is_send:
                word = word + (t.action.symbol,)
            elif word[:1] == (t.action.symbol,):
                word = word[1:]
            else:
                continue
            composite = (
                state.composite[:i] + (t.target,) + state.composite[i + 1 :]
            )
            contents = state.contents[:c] + (word,) + state.contents[c + 1 :]
            result.append(
                (node, t.action, GlobalState(composite, contents))
            )
    return result


StatePredicate = Callable[[GlobalState], bool]


class Explorer:
    """Records states and edges of a breadth-first exploration.

    Subclasses or callers decide which successors to expand; this class
    enforces the budget and tracks whether anything was cut off.
    """

    def __init__(
        self,
        protocol: Protocol,
        budget: Optional[Budget] = None,
        state_filter: Optional[StatePredicate] = None,
    ) -> None:
        self.protocol = protocol
        self.budget = budget or Budget.default()
        self.state_filter = state_filter
        self.states: list[GlobalState] = []
        self.index: dict[GlobalState, int] = {}
        self.edges: list[Edge] = []
        self.truncated = False

    def add(self, state: GlobalState) -> Optional[int]:
        """Records `state`; `None` if the filter or the budget rejects it."""
        known = self.index.get(state)
        if known is not None:
            return known
        if self.state_filter is not None and not self.state_filter(state):
            return None
        if not self.budget.admits(state):
            self.truncated = True
            return None
        if len(self.states) >= self.budget.max_states:
            self.truncated = True
            return None
        self.index[state] = len(self.states)
        self.states.append(state)
        return self.index[state]

    def graph(self) -> StateGraph:
        sg = StateGraph(
            self.protocol, self.states, self.edges, not self.truncated
        )
        logging.info(
            "Explored %d states and %d edges of %s (exhausted=%s)",
            len(sg.states),
            len(sg.edges),
            self.protocol.name,
            sg.exhausted,
        )
        if self.truncated:
            logging.warning(
                "Exploration of %s was cut off by the budget %s",
                self.protocol.name,
                self.budget,
            )
        return sg


@cfsm_verify_export("cfsm_verify.explore.reach")
def reach(
    protocol: Protocol,
    budget: Optional[Budget] = None,
    state_filter: Optional[StatePredicate] = None,
    initial: Optional[GlobalState] = None,
) -> StateGraph:
    """Explores the global states reachable from the initial one.

    Args:
        protocol: A validated protocol.
        budget: The caps; defaults to `Budget.default()`.
        state_filter: If given, states failing it are neither recorded
            nor expanded. Exhaustion is then relative to the filter: an
            exhausted result says nothing about states it excludes.
        initial: The start state; defaults to the initial global state.

    Returns:
        The explored `StateGraph`. Identical calls give identical graphs.
    """
    explorer = Explorer(protocol, budget, state_filter)
    start = initial or initial_state(protocol)
    if explorer.add(start) is None:
        raise ValueError(
            "The start state is rejected by the budget or the filter"
        )
    i = 0
    while i < len(explorer.states):
        current = explorer.states[i]
        for node, action, following in successors(protocol, current):
            j = explorer.add(following)
            if j is not None:
                explorer.edges.append(Edge(i, node, action, j))
        i += 1
    return explorer.graph()


@cfsm_verify_export("cfsm_verify.explore.replay")
def replay(
    protocol: Protocol,
    start: GlobalState,
    images: Mapping[types.NodeId, Sequence[Transition]],
) -> Optional[GlobalState]:
    """Runs each node's local run from `start`, one node at a time.

    Two paths with the same local runs from the same start end in the same
    state. A node is run until it waits for a message that is not there
    yet, then the next node gets its turn, so this finds the common end
    state of every path with these local runs.

    Args:
        protocol: The protocol.
        start: The start state.
        images: The transitions each node takes, in order.

    Returns:
        The end state, or `None` if the runs do not fit together.
    """
    composite = list(start.composite)
    contents = [list(w) for w in start.contents]
    pending = {
        node: collections.deque(images.get(node, ()))
        for node in protocol.nodes
    }
    progress = True
    while progress:
        progress = False
        for i, node in enumerate(protocol.nodes):
            queue = pending[node]
            machine = protocol.machine(node)
            while queue:
                t = queue[0]
                if t.source != composite[i] or t not in machine.outgoing(
                    t.source
                ):
                    return None
                c = protocol.channel_index(t.action.channel)
                if t.action.is_receive:
                    if contents[c][:1] != [t.action.symbol]:
                        break
                    contents[c].pop(0)
                else:
                    contents[c].append(t.action.symbol)
                composite[i] = t.target
                queue.popleft()
                progress = True
    if any(pending.values()):
        return None
    return GlobalState(tuple(composite), tuple(tuple(w) for w in contents))


def local_runs(
    sg: StateGraph, path: Sequence[Edge]
) -> dict[types.NodeId, list[Transition]]:
    """The transitions each node takes along `path`."""
    runs: dict[types.NodeId, list[Transition]] = {
        node: [] for node in sg.protocol.nodes
    }
    for edge in path:
        i = sg.protocol.node_index(edge.node)
        runs[edge.node].append(
            Transition(
                sg.states[edge.source].composite[i],
                edge.action,
                sg.states[edge.target].composite[i],
            )
        )
    return runs
