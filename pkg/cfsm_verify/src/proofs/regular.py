"""Regular proof tables for cyclic protocols.

In a cyclic protocol every path can be rearranged so that the channels
other than a designated channel `β` are emptied as soon as they are
filled. The sets `Q(S)` of contents of `β` with all other channels empty
then describe every stable state: `S` is stable iff `λ ∈ Q(S)` for the
smallest consistent table containing the initial state.
"""

import collections
from typing import Callable, Optional

import networkx as nx
from absl import logging

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.errors import HypothesisError
from cfsm_verify.src.lang.dfa import Dfa
from cfsm_verify.src.lang.dfa import union_from_states
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.validation import classify
from cfsm_verify.src.proofs import tables
from cfsm_verify.src.proofs.tables import Certificate
from cfsm_verify.src.proofs.tables import Consistency
from cfsm_verify.src.proofs.tables import Extension
from cfsm_verify.src.proofs.tables import RegularTable


@cfsm_verify_export("cfsm_verify.proofs.h_graph")
def h_graph(protocol: Protocol, channel: types.ChannelId) -> nx.MultiDiGraph:
    """Simultaneous send and receive hops on the channels other than one.

    There is an edge `S1 -> S2` for every channel `ξ != channel`, symbol
    `b`, send `-b` of the tail of `ξ` and reception `+b` of its head that
    together move `S1` to `S2`. Edge keys are `(ξ, b, send, receive)`.
    """
    protocol.channel_index(channel)
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(protocol.composite_states())
    for xi in protocol.channels:
        if xi.name == channel:
            continue
        tail = protocol.node_index(xi.tail)
        head = protocol.node_index(xi.head)
        sends = [
            t
            for t in protocol.machine(xi.tail).transitions
            if t.action.is_send and t.action.channel == xi.name
        ]
        receptions = [
            t
            for t in protocol.machine(xi.head).transitions
            if t.action.is_receive and t.action.channel == xi.name
        ]
        for s in sends:
            for r in receptions:
                if s.action.symbol != r.action.symbol:
                    continue
                for composite in protocol.composite_states():
                    if composite[tail] != s.source:
                        continue
                    if composite[head] != r.source:
                        continue
                    moved = tables.with_local(composite, tail, s.target)
                    moved = tables.with_local(moved, head, r.target)
                    key = (xi.name, s.action.symbol, s, r)
                    graph.add_edge(composite, moved, key=key)
    return graph


def _check_cyclic(protocol: Protocol) -> None:
    if not classify(protocol).is_cyclic:
        raise HypothesisError(
            f"Protocol {protocol.name!r} is not cyclic; regular tables need "
            "a communication graph that is a single directed cycle"
        )


def _full_entries(
    protocol: Protocol, table: RegularTable
) -> dict[types.CompositeState, Dfa]:
    if table.is_partial:
        raise ValueError(
            "The table is partial; extend it with `extend_regular` first"
        )
    entries = {}
    for composite in protocol.composite_states():
        entry = table.entry(composite)
        if entry is None:
            raise ValueError(
                f"The table has no entry for ({','.join(composite)}) and "
                "does not default to empty"
            )
        entries[composite] = entry
    return entries


class _Inclusions:
    """Memoized `left ⊆ right` witnesses; Dfas hash by structure."""

    def __init__(self) -> None:
        self.cache: dict[tuple[Dfa, Dfa], Optional[types.Word]] = {}

    def witness(self, left: Dfa, right: Dfa) -> Optional[types.Word]:
        key = (left, right)
        if key not in self.cache:
            self.cache[key] = right.inclusion_witness(left)
        return self.cache[key]


@cfsm_verify_export("cfsm_verify.proofs.check_regular_consistency")
def check_regular_consistency(
    protocol: Protocol,
    channel: types.ChannelId,
    table: RegularTable,
    threads: int = 1,
) -> Consistency:
    """Checks that the sets `Q(S)` are closed under the protocol's moves.

    Three kinds of inclusions are checked: a reception `+b` on the channel
    takes `b \\ Q(S)` into `Q(S')`, a send `-b` on it takes `Q(S)·b` into
    `Q(S')`, and an edge `S -> S'` of `h_graph` takes `Q(S)` into `Q(S')`.
    Inclusions along H-paths follow from those along H-edges.

    Args:
        protocol: A cyclic protocol.
        channel: The designated channel.
        table: A full table over `channel`.
        threads: Worker threads; the result does not depend on it.

    Raises:
        HypothesisError: if `protocol` is not cyclic.
        ValueError: if `table` is partial or lacks an entry.
    """
    _check_cyclic(protocol)
    if table.channel != channel:
        raise ValueError(
            f"The table is over {table.channel!r}, not over {channel!r}"
        )
    entries = _full_entries(protocol, table)
    inclusions = _Inclusions()
    obligations: list[tables.Obligation] = []

    def add(
        source: types.CompositeState,
        target: types.CompositeState,
        step: str,
        transform: Callable[[Dfa], Dfa],
    ) -> None:
        entry = entries[source]
        if entry.is_empty():
            return

        def check() -> Optional[types.Word]:
            return inclusions.witness(transform(entry), entries[target])

        obligations.append((source, target, step, check))

    c = protocol.channel(channel)
    for source, target, i, t in tables.local_moves(protocol):
        if t.action.channel != channel:
            continue
        node = protocol.nodes[i]
        symbol = t.action.symbol
        if t.action.is_receive and node == c.head:
            add(
                source,
                target,
                tables.step_text(node, t),
                lambda q, b=symbol: q.quotient_symbol(b),
            )
        elif t.action.is_send and node == c.tail:
            add(
                source,
                target,
                tables.step_text(node, t),
                lambda q, b=symbol: q.append_symbol(b),
            )
    for source, target, key in h_graph(protocol, channel).edges(keys=True):
        xi, symbol, _, _ = key
        add(source, target, f"relay {symbol}@{xi}", lambda q: q)
    return tables.check_obligations(obligations, threads)


@cfsm_verify_export("cfsm_verify.proofs.extend_regular")
def extend_regular(
    protocol: Protocol,
    channel: types.ChannelId,
    table: RegularTable,
    threads: int = 1,
) -> Extension:
    """Completes a table declared on a product of state sets `V_j`.

    An automaton `F` over the composite states reads the channel: its
    `λ`-moves are the edges of `h_graph` and it reads `b` when the head of
    the channel receives `b`. An undeclared `Q(S)` is the set of `y` with
    `xy ∈ Q(S')` for some declared `S'` and some `x` leading `F` from `S'`
    to `S`. These are the smallest entries any consistent completion can
    have, so the completion is checked and returned either way.

    Raises:
        HypothesisError: if `protocol` is not cyclic or the sets `V_j` do
            not contain every initial state and send target.
        ValueError: if the table is not indexed by sets `V_j`, or declares
            entries outside their product.
    """
    _check_cyclic(protocol)
    if table.v_sets is None:
        raise ValueError("The table declares no state sets `V_j`")
    declared_on = tables.index_set(protocol, table.v_sets)
    outside = set(table.entries) - declared_on
    if outside:
        first = min(outside)
        raise ValueError(
            f"The table declares ({','.join(first)}) outside the product "
            "of its state sets"
        )
    declared = {}
    for composite in sorted(declared_on):
        entry = table.entry(composite)
        if entry is None:
            raise ValueError(
                f"The table has no entry for ({','.join(composite)}) and "
                "does not default to empty"
            )
        declared[composite] = entry

    moves: dict[
        types.CompositeState,
        list[tuple[Optional[types.Symbol], types.CompositeState]],
    ] = collections.defaultdict(list)
    head = protocol.node_index(protocol.channel(channel).head)
    for source, target, i, t in tables.local_moves(protocol):
        if (
            i == head
            and t.action.is_receive
            and t.action.channel == channel
        ):
            moves[source].append((t.action.symbol, target))
    for source, target in h_graph(protocol, channel).edges():
        moves[source].append((None, target))

    # Breadth-first over (composite state, declared Dfa, Dfa state).
    dfas = list(dict.fromkeys(declared.values()))
    number = {dfa: k for k, dfa in enumerate(dfas)}
    seen = {
        (composite, number[dfa], dfa.start)
        for composite, dfa in declared.items()
    }
    queue = collections.deque(sorted(seen))
    while queue:
        composite, k, q = queue.popleft()
        for symbol, target in moves.get(composite, ()):
            moved = q if symbol is None else dfas[k].step(q, symbol)
            item = (target, k, moved)
            if item not in seen:
                seen.add(item)
                queue.append(item)
    starts: dict[types.CompositeState, list[tuple[Dfa, int]]] = (
        collections.defaultdict(list)
    )
    for composite, k, q in sorted(seen):
        if composite not in declared_on:
            starts[composite].append((dfas[k], q))
    entries = dict(declared)
    for composite, pairs in starts.items():
        entry = union_from_states(pairs).minimize()
        if not entry.is_empty():
            entries[composite] = entry
    logging.info(
        "Extended %d declared sets to %d nonempty sets over %r",
        len(declared),
        sum(not e.is_empty() for e in entries.values()),
        channel,
    )
    full = RegularTable(channel, table.alphabet, entries, default_empty=True)
    return Extension(
        full, check_regular_consistency(protocol, channel, full, threads)
    )


@cfsm_verify_export("cfsm_verify.proofs.prove_not_stable")
def prove_not_stable(
    protocol: Protocol,
    channel: types.ChannelId,
    table: RegularTable,
    composite: types.CompositeState,
) -> Certificate:
    """Whether a consistent full table shows that `composite` is not stable.

    It does iff `λ ∈ Q(S⁰)` and `λ ∉ Q(composite)`.

    Raises:
        HypothesisError: if `λ ∉ Q(S⁰)`; such a table proves nothing.
        ValueError: if the table is partial or lacks an entry.
    """
    if table.channel != channel:
        raise ValueError(
            f"The table is over {table.channel!r}, not over {channel!r}"
        )
    composite = tuple(composite)
    entries = _full_entries(protocol, table)
    if composite not in entries:
        raise ValueError(
            f"({','.join(composite)}) is not a composite state of "
            f"{protocol.name!r}"
        )
    initial = protocol.initial_composite
    if not entries[initial].accepts(()):
        raise HypothesisError(
            "Malformed certificate: the entry of the initial composite state "
            f"({','.join(initial)}) does not contain the empty word"
        )
    if entries[composite].accepts(()):
        return Certificate(
            False,
            f"the entry of ({','.join(composite)}) contains the empty word",
            composite,
            (),
        )
    return Certificate(
        True,
        f"the entry of ({','.join(composite)}) excludes the empty word, so "
        "the state is not stable",
        composite,
    )
