"""Priority-scheduled exploration.

Two paths that make every node take the same local steps end in the same
global state, so an exploration only needs one path per class. A priority
scheme picks it: a node moves only when the scheme says so. Under the
standard scheme nodes are grouped in blocks and a node moves only if every
node of every earlier block is blocked. Under the blocking-chain scheme the
node with the highest priority is followed along the channels it waits on,
and the first node on that chain able to move does.

Whether a node is blocked depends on its future moves, not only on its
local state: a node at a state with an enabled send may be about to
receive, or may never move again. The exploration therefore guesses, for
every node that is about to be scheduled, whether it goes on, waits for a
specific empty input channel, or stops for good. These guesses are part of
the explored states and are dropped from the returned `StateGraph`.
"""

import collections
import dataclasses
from typing import Collection, Optional, Sequence

from absl import logging

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.errors import HypothesisError
from cfsm_verify.src.explore.state_space import Budget
from cfsm_verify.src.explore.state_space import Edge
from cfsm_verify.src.explore.state_space import Explorer
from cfsm_verify.src.explore.state_space import GlobalState
from cfsm_verify.src.explore.state_space import StatePredicate
from cfsm_verify.src.explore.state_space import StateGraph
from cfsm_verify.src.explore.state_space import initial_state
from cfsm_verify.src.explore.state_space import successors
from cfsm_verify.src.flowctl import smooth
from cfsm_verify.src.model.protocol import Action
from cfsm_verify.src.model.protocol import Protocol

CYCLIC = "cyclic"
SMOOTH = "smooth"
CHAIN = "chain"

# Node statuses besides "waiting for channel <name>".
ACTIVE = ""
STOPPED = "!"

Statuses = tuple[str, ...]
Move = tuple[types.NodeId, Action, GlobalState]


@cfsm_verify_export("cfsm_verify.flowctl.PriorityScheme")
@dataclasses.dataclass(frozen=True)
class PriorityScheme:
    """How scheduled exploration chooses the node to move.

    Use the `cyclic`, `smooth` and `chain` constructors.

    Attributes:
        kind: `cyclic`, `smooth` or `chain`.
        channel: The designated channel of a cyclic scheme.
        sets: The smooth set of a smooth scheme.
        order: The node priorities of a chain scheme, highest first.
    """

    kind: str
    channel: Optional[types.ChannelId] = None
    sets: tuple[frozenset[types.NodeId], ...] = ()
    order: tuple[types.NodeId, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in (CYCLIC, SMOOTH, CHAIN):
            raise ValueError(
                f"Unknown priority scheme {self.kind!r}; expected "
                f"{CYCLIC!r}, {SMOOTH!r} or {CHAIN!r}"
            )
        if self.kind == CYCLIC and self.channel is None:
            raise ValueError("A cyclic scheme needs a `channel`")

    @classmethod
    def cyclic(cls, channel: types.ChannelId) -> "PriorityScheme":
        return cls(CYCLIC, channel=channel)

    @classmethod
    def smooth(
        cls, sets: Sequence[Collection[types.NodeId]]
    ) -> "PriorityScheme":
        return cls(SMOOTH, sets=tuple(frozenset(s) for s in sets))

    @classmethod
    def chain(cls, order: Sequence[types.NodeId]) -> "PriorityScheme":
        return cls(CHAIN, order=tuple(order))

    def smooth_set(
        self, protocol: Protocol
    ) -> tuple[frozenset[types.NodeId], ...]:
        """The smooth set behind a standard scheme."""
        if self.kind == CYCLIC:
            return smooth.cyclic_smooth_set(protocol, self.channel)
        if self.kind == SMOOTH:
            return self.sets
        raise ValueError("A chain scheme has no smooth set")

    def blocks(self, protocol: Protocol) -> tuple[frozenset[str], ...]:
        """The priority blocks, highest first; one node each for chains.

        Raises:
            HypothesisError: if the scheme does not fit `protocol`.
        """
        if self.kind == CHAIN:
            if sorted(self.order) != sorted(protocol.nodes):
                raise HypothesisError(
                    f"The chain order {list(self.order)} is not an "
                    f"ordering of the nodes {list(protocol.nodes)}"
                )
            return tuple(frozenset([node]) for node in self.order)
        if self.kind == CYCLIC:
            protocol.channel_index(self.channel)
        return smooth.smooth_schedule(protocol, self.smooth_set(protocol))


@cfsm_verify_export("cfsm_verify.flowctl.parse_scheme")
def parse_scheme(text: str) -> PriorityScheme:
    """Parses `cyclic:<channel>`, `smooth:<A>;<B>...` or `chain:<n,...>`.

    The members of a smooth set are separated by `;` and their nodes by
    `,`.
    """
    kind, _, body = text.partition(":")
    kind = kind.strip()
    if not body.strip():
        raise ValueError(
            f"Expected `<kind>:<argument>` for a priority scheme, received "
            f"{text!r}"
        )
    if kind == CYCLIC:
        return PriorityScheme.cyclic(body.strip())
    if kind == SMOOTH:
        return PriorityScheme.smooth(
            [
                [n.strip() for n in member.split(",") if n.strip()]
                for member in body.split(";")
                if member.strip()
            ]
        )
    if kind == CHAIN:
        return PriorityScheme.chain(
            [n.strip() for n in body.split(",") if n.strip()]
        )
    raise ValueError(f"Unknown priority scheme {kind!r} in {text!r}")


@cfsm_verify_export("cfsm_verify.flowctl.cyclic_filter")
def cyclic_filter(
    protocol: Protocol, channel: types.ChannelId
) -> StatePredicate:
    """Admits the states where the channels other than `channel` hold at
    most one message in total.

    In a cyclic protocol, every path between two states with empty channels
    can be reordered into one that stays within these states, so passing
    the filter to `reach` keeps every reachable stable state.

    Raises:
        HypothesisError: if the protocol is not cyclic.
    """
    smooth.ring_order(protocol, channel)
    skip = protocol.channel_index(channel)

    def admits(state: GlobalState) -> bool:
        total = sum(
            len(w) for i, w in enumerate(state.contents) if i != skip
        )
        return total <= 1

    return admits


@dataclasses.dataclass(frozen=True, order=True)
class _Node:
    state: GlobalState
    statuses: Statuses


class ScheduledSpace:
    """The explored states of a scheduled exploration, with the guesses.

    Attributes:
        protocol: The protocol explored.
        nodes: `(global state, statuses)` pairs in discovery order. A
            status is empty for a node that goes on, `!` for one that
            stopped and a channel name for one waiting on that channel.
        moves: `(source, node, action, target)` indices into `nodes`.
        guesses: `(source, target)` pairs that only change statuses.
        exhausted: Whether nothing was cut off by the budget.
    """

    def __init__(
        self,
        protocol: Protocol,
        nodes: Sequence[_Node],
        moves: Sequence[tuple[int, types.NodeId, Action, int]],
        guesses: Sequence[tuple[int, int]],
        explorer: Explorer,
    ) -> None:
        self.protocol = protocol
        self.nodes = tuple(nodes)
        self.moves = tuple(moves)
        self.guesses = tuple(guesses)
        self.exhausted = not explorer.truncated
        self._explorer = explorer

    def state_graph(self) -> StateGraph:
        """The global states and moves, without the guesses."""
        index = self._explorer.index
        edges = sorted(
            {
                Edge(
                    index[self.nodes[s].state],
                    node,
                    action,
                    index[self.nodes[t].state],
                )
                for s, node, action, t in self.moves
            }
        )
        sg = StateGraph(
            self.protocol, self._explorer.states, edges, self.exhausted
        )
        logging.info(
            "Scheduled exploration of %s kept %d of the global states, "
            "%d with guesses",
            self.protocol.name,
            len(sg),
            len(self.nodes),
        )
        return sg

    def _finishing(self) -> set[int]:
        """Indices from which a state with empty channels is reachable."""
        backward = collections.defaultdict(list)
        for s, _, _, t in self.moves:
            backward[t].append(s)
        for s, t in self.guesses:
            backward[t].append(s)
        found = {
            i for i, n in enumerate(self.nodes) if n.state.channels_empty
        }
        queue = collections.deque(found)
        while queue:
            for s in backward[queue.popleft()]:
                if s not in found:
                    found.add(s)
                    queue.append(s)
        return found

    def frequently_empty(
        self, groups: Sequence[Collection[types.ChannelId]]
    ) -> list[tuple[GlobalState, GlobalState]]:
        """Moves where no channel of some group is empty on either side.

        Only moves on paths that can still end with all channels empty
        count. An empty result means the condition holds at least once in
        every two consecutive states of every such path.
        """
        indices = [
            [self.protocol.channel_index(c) for c in group]
            for group in groups
        ]

        def holds(state: GlobalState) -> bool:
            return all(
                any(not state.contents[c] for c in group) for group in indices
            )

        finishing = self._finishing()
        found = set()
        for s, _, _, t in self.moves:
            before, after = self.nodes[s].state, self.nodes[t].state
            if t in finishing and not holds(before) and not holds(after):
                found.add((before, after))
        return sorted(found)


class _Scheduler:
    def __init__(
        self, protocol: Protocol, scheme: PriorityScheme
    ) -> None:
        self.protocol = protocol
        self.chain = scheme.kind == CHAIN
        self.blocks = scheme.blocks(protocol)
        self.node_index = {n: i for i, n in enumerate(protocol.nodes)}

    def moves(
        self, state: GlobalState, statuses: Statuses, node: types.NodeId
    ) -> list[tuple[Action, GlobalState]]:
        status = statuses[self.node_index[node]]
        if status == STOPPED:
            return []
        found = []
        for _, action, following in successors(
            self.protocol, state, [node]
        ):
            if status == ACTIVE or (
                action.is_receive and action.channel == status
            ):
                found.append((action, following))
        return found

    def waits(
        self, state: GlobalState, node: types.NodeId
    ) -> list[types.ChannelId]:
        """Empty input channels `node` can receive from at its state."""
        local = state.composite[self.node_index[node]]
        channels = []
        for t in self.protocol.machine(node).outgoing(local):
            c = self.protocol.channel_index(t.action.channel)
            if (
                t.action.is_receive
                and not state.contents[c]
                and t.action.channel not in channels
            ):
                channels.append(t.action.channel)
        return channels

    def guesses(
        self, statuses: Statuses, node: types.NodeId, waits: list[str]
    ) -> list[Statuses]:
        i = self.node_index[node]
        return [
            statuses[:i] + (status,) + statuses[i + 1 :]
            for status in [STOPPED, *waits]
        ]

    def step(
        self, state: GlobalState, statuses: Statuses
    ) -> tuple[list[Move], list[Statuses]]:
        """The moves and status guesses allowed at a scheduled state."""
        if self.chain:
            return self._chain_step(state, statuses)
        for block in self.blocks:
            moves = []
            guesses = []
            for node in self.protocol.nodes:
                if node not in block:
                    continue
                found = self.moves(state, statuses, node)
                moves.extend((node, a, g) for a, g in found)
                if found and statuses[self.node_index[node]] == ACTIVE:
                    guesses.extend(
                        self.guesses(
                            statuses, node, self.waits(state, node)
                        )
                    )
            if moves:
                return moves, guesses
        return [], []

    def _chain_step(
        self, state: GlobalState, statuses: Statuses
    ) -> tuple[list[Move], list[Statuses]]:
        stuck: set[types.NodeId] = set()
        for (head,) in self.blocks:
            if head in stuck or statuses[self.node_index[head]] == STOPPED:
                continue
            seen = []
            node = head
            while node not in seen:
                seen.append(node)
                status = statuses[self.node_index[node]]
                if node in stuck or status == STOPPED:
                    break
                found = self.moves(state, statuses, node)
                if found:
                    guesses = []
                    if status == ACTIVE:
                        guesses = self.guesses(
                            statuses, node, self.waits(state, node)
                        )
                    return [(node, a, g) for a, g in found], guesses
                if status == ACTIVE:
                    # Blocked without saying on which channel.
                    return [], self.guesses(
                        statuses, node, self.waits(state, node)
                    )
                if state.contents[self.protocol.channel_index(status)]:
                    break
                node = self.protocol.channel(status).tail
            stuck.update(seen)
        return [], []


@cfsm_verify_export("cfsm_verify.flowctl.explore_schedule")
def explore_schedule(
    protocol: Protocol,
    scheme: PriorityScheme,
    budget: Optional[Budget] = None,
) -> ScheduledSpace:
    """Explores the priority executions of `protocol` under `scheme`.

    Args:
        protocol: A validated protocol.
        scheme: The priority scheme.
        budget: Caps on the global states; defaults to `Budget.default()`.

    Raises:
        HypothesisError: if `scheme` does not fit `protocol`.
    """
    scheduler = _Scheduler(protocol, scheme)
    explorer = Explorer(protocol, budget)
    start = _Node(
        initial_state(protocol), (ACTIVE,) * len(protocol.nodes)
    )
    explorer.add(start.state)
    nodes = [start]
    index = {start: 0}
    moves = []
    guesses = []

    def add(node: _Node) -> Optional[int]:
        if node in index:
            return index[node]
        if explorer.add(node.state) is None:
            return None
        index[node] = len(nodes)
        nodes.append(node)
        return index[node]

    i = 0
    while i < len(nodes):
        current = nodes[i]
        found, statuses = scheduler.step(current.state, current.statuses)
        for mover, action, following in found:
            k = scheduler.node_index[mover]
            after = current.statuses[:k] + (ACTIVE,) + (
                current.statuses[k + 1 :]
            )
            j = add(_Node(following, after))
            if j is not None:
                moves.append((i, mover, action, j))
        for guessed in statuses:
            j = add(_Node(current.state, guessed))
            if j is not None:
                guesses.append((i, j))
        i += 1
    return ScheduledSpace(protocol, nodes, moves, guesses, explorer)


@cfsm_verify_export("cfsm_verify.flowctl.scheduled_reach")
def scheduled_reach(
    protocol: Protocol,
    scheme: PriorityScheme,
    budget: Optional[Budget] = None,
) -> StateGraph:
    """The global states visited by the priority executions.

    Every state is reachable in the unrestricted state space. Reachability
    of states with empty channels is preserved; other states may be
    missing.
    """
    return explore_schedule(protocol, scheme, budget).state_graph()


@cfsm_verify_export("cfsm_verify.flowctl.frequently_empty")
def frequently_empty(
    space: ScheduledSpace, groups: Sequence[Collection[types.ChannelId]]
) -> list[tuple[GlobalState, GlobalState]]:
    """Violations of "some channel of every group is empty, frequently".

    For a smooth set, the groups are the negative boundaries of its
    members (see `smooth.negative_boundaries`).
    """
    return space.frequently_empty(groups)
