"""Recognizable proof tables for general protocols.

A table of recognizable relations `R(S)` is consistent when every receive
step takes `R(S)` with the head symbol removed into `R(S')` and every send
step takes `R(S)` with the symbol appended into `R(S')`. A consistent
table containing the initial contents at the initial composite state
contains every reachable global state, so anything outside it is
unreachable.
"""

import collections
import functools
from typing import Callable, Optional

import networkx as nx
from absl import logging

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.errors import HypothesisError
from cfsm_verify.src.explore.state_space import GlobalState
from cfsm_verify.src.explore.state_space import initial_state
from cfsm_verify.src.lang.dfa import Dfa
from cfsm_verify.src.lang.dfa import crawl
from cfsm_verify.src.lang.recrel import RecRel
from cfsm_verify.src.model.protocol import Action
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.validation import classify
from cfsm_verify.src.proofs import tables
from cfsm_verify.src.proofs.tables import Certificate
from cfsm_verify.src.proofs.tables import Consistency
from cfsm_verify.src.proofs.tables import Extension
from cfsm_verify.src.proofs.tables import RecognizableTable
from cfsm_verify.src.proofs.tables import Restriction


def _apply(relation: RecRel, action: Action) -> RecRel:
    if action.is_send:
        return relation.append_channel(action.channel, action.symbol)
    return relation.quotient_channel(action.channel, action.symbol)


def _full_entries(
    protocol: Protocol, table: RecognizableTable
) -> dict[types.CompositeState, RecRel]:
    if table.is_partial:
        raise ValueError(
            "The table is partial; extend it with `extend_recognizable` or "
            "`extend_feedback` first"
        )
    if table.channels != protocol.channel_names:
        raise ValueError(
            f"The table is over the channels {table.channels}, the "
            f"protocol has {protocol.channel_names}"
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


@cfsm_verify_export("cfsm_verify.proofs.check_recognizable_consistency")
def check_recognizable_consistency(
    protocol: Protocol,
    table: RecognizableTable,
    restriction: Optional[Restriction] = None,
    threads: int = 1,
) -> Consistency:
    """Checks that the relations `R(S)` are closed under every step.

    Args:
        protocol: The protocol.
        table: A full table over the protocol's channels.
        restriction: If given, only steps between contents satisfying it
            are checked: both sides are intersected with it first.
        threads: Worker threads; the result does not depend on it.

    Raises:
        ValueError: if `table` is partial or lacks an entry.
    """
    entries = _full_entries(protocol, table)
    limit = None
    if restriction is not None:
        limit = restriction.relation(protocol.channel_names, table.alphabets)
        restricted = {s: r.intersect(limit) for s, r in entries.items()}
    else:
        restricted = entries
    emptiness = {s: r.is_empty() for s, r in restricted.items()}
    obligations: list[tables.Obligation] = []
    for source, target, i, t in tables.local_moves(protocol):
        if emptiness[source]:
            continue

        def check(
            source: types.CompositeState = source,
            target: types.CompositeState = target,
            action: Action = t.action,
        ) -> Optional[types.Contents]:
            image = _apply(restricted[source], action)
            if limit is not None:
                image = image.intersect(limit)
            return entries[target].inclusion_witness(image)

        step = tables.step_text(protocol.nodes[i], t)
        obligations.append((source, target, step, check))
    return tables.check_obligations(obligations, threads)


# Extension from state sets.


def _in_channels(protocol: Protocol) -> dict[types.NodeId, Optional[str]]:
    degrees = classify(protocol).node_in_degrees
    crowded = sorted(n for n, d in degrees.items() if d > 1)
    if crowded:
        raise HypothesisError(
            f"Nodes {crowded} have several input channels; extend the "
            "table with `extend_feedback` instead"
        )
    found = {}
    for node in protocol.nodes:
        channels = protocol.in_channels(node)
        found[node] = channels[0].name if channels else None
    return found


def _receive_words(
    protocol: Protocol, node: types.NodeId, channel: types.ChannelId
) -> Callable[[types.StateName, types.StateName], Dfa]:
    """`W(q, p)`: the words node `node` can receive going from `q` to `p`.

    The empty word is in `W(q, q)`.
    """
    machine = protocol.machine(node)
    alphabet = protocol.alphabet(channel)

    @functools.lru_cache(maxsize=None)
    def explore(q: types.StateName) -> tuple[Dfa, list[frozenset[str]]]:
        def follow(states: frozenset[str], symbol: str) -> frozenset[str]:
            return frozenset(
                t.target
                for s in states
                for t in machine.outgoing(s)
                if t.action.is_receive and t.action.symbol == symbol
            )

        return crawl(alphabet, frozenset({q}), lambda _: False, follow)

    @functools.lru_cache(maxsize=None)
    def words(q: types.StateName, p: types.StateName) -> Dfa:
        tracker, states = explore(q)
        accepting = [p in s for s in states]
        return Dfa(alphabet, tracker.table, accepting, 0).minimize()

    return words


@cfsm_verify_export("cfsm_verify.proofs.extend_recognizable")
def extend_recognizable(
    protocol: Protocol, table: RecognizableTable, threads: int = 1
) -> Extension:
    """Completes a table declared on a product of state sets `V_j`.

    Every node must have at most one input channel. For an undeclared
    `S`, `R(S)` collects the vectors `y` such that `x·y ∈ R(S')` for a
    declared `S'`, where each component of `x` is a word the channel's
    head node can receive on its way from its state in `S'` to its state
    in `S`. These are the smallest entries any consistent completion can
    have, so the completion is checked and returned either way.

    Raises:
        HypothesisError: if a node has several input channels, or the
            sets `V_j` do not contain every initial state and send target.
        ValueError: if the table is not indexed by sets `V_j`, or declares
            entries outside their product.
    """
    if table.v_sets is None:
        raise ValueError("The table declares no state sets `V_j`")
    in_channels = _in_channels(protocol)
    declared_on = tables.index_set(protocol, table.v_sets)
    declared = _declared(table, declared_on)
    receive_words = {
        node: _receive_words(protocol, node, channel)
        for node, channel in in_channels.items()
        if channel is not None
    }
    entries = dict(declared)
    for composite in protocol.composite_states():
        if composite in declared_on:
            continue
        parts = []
        for source, relation in declared.items():
            languages = {}
            for node, q, p in zip(protocol.nodes, source, composite):
                channel = in_channels[node]
                if channel is None:
                    if q != p:
                        break
                    continue
                language = receive_words[node](q, p)
                if language.is_empty():
                    break
                languages[channel] = language
            else:
                part = relation.quotient_languages(languages)
                if not part.is_empty():
                    parts.append(part)
        if parts:
            entries[composite] = functools.reduce(RecRel.union, parts)
    return _finish(protocol, table, entries, threads)


def _declared(
    table: RecognizableTable, declared_on: set[types.CompositeState]
) -> dict[types.CompositeState, RecRel]:
    outside = set(table.entries) - declared_on
    if outside:
        raise ValueError(
            f"The table declares ({','.join(min(outside))}) outside its "
            "index set"
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
    return declared


def _finish(
    protocol: Protocol,
    table: RecognizableTable,
    entries: dict[types.CompositeState, RecRel],
    threads: int,
) -> Extension:
    entries = {s: r for s, r in entries.items() if not r.is_empty()}
    logging.info(
        "Extended the table of %s to %d nonempty relations",
        protocol.name,
        len(entries),
    )
    full = RecognizableTable(
        table.channels, table.alphabets, entries, default_empty=True
    )
    return Extension(
        full, check_recognizable_consistency(protocol, full, threads=threads)
    )


# Extension from a feedback vertex set.


@cfsm_verify_export("cfsm_verify.proofs.product_graph")
def product_graph(protocol: Protocol) -> nx.DiGraph:
    """Composite states joined by the moves of any single node."""
    graph = nx.DiGraph()
    graph.add_nodes_from(protocol.composite_states())
    for source, target, _, _ in tables.local_moves(protocol):
        graph.add_edge(source, target)
    return graph


@cfsm_verify_export("cfsm_verify.proofs.extend_feedback")
def extend_feedback(
    protocol: Protocol, table: RecognizableTable, threads: int = 1
) -> Extension:
    """Completes a table declared on a feedback vertex set `V`.

    For `S` outside `V`, `R(S)` collects the contents reached from a
    declared entry along a path whose intermediate composite states avoid
    `V`. Removing `V` leaves the product graph acyclic, so the entries are
    computed in topological order, each as the union of its predecessors'
    entries transformed by the connecting step.

    Raises:
        HypothesisError: if `V` misses a cycle of the product graph; the
            message shows the cycle.
        ValueError: if the table has no feedback set, or declares entries
            outside it.
    """
    if table.feedback is None:
        raise ValueError("The table declares no feedback vertex set")
    graph = product_graph(protocol)
    unknown = table.feedback - set(graph)
    if unknown:
        raise ValueError(
            f"The feedback set names ({','.join(min(unknown))}), which is "
            f"not a composite state of {protocol.name!r}"
        )
    rest = graph.subgraph(set(graph) - table.feedback)
    try:
        cycle = nx.find_cycle(rest)
    except nx.NetworkXNoCycle:
        cycle = None
    if cycle is not None:
        hops = " -> ".join(f"({','.join(u)})" for u, _ in cycle)
        raise HypothesisError(
            f"The feedback set misses the product graph cycle {hops}"
        )
    declared = _declared(table, set(table.feedback))
    incoming = collections.defaultdict(list)
    for source, target, _, t in tables.local_moves(protocol):
        incoming[target].append((source, t.action))
    entries = dict(declared)
    empty = table.empty_relation()
    order = nx.lexicographical_topological_sort(rest)
    for composite in order:
        parts = []
        for source, action in incoming[composite]:
            if source not in entries:
                continue
            part = _apply(entries[source], action)
            if not part.is_empty():
                parts.append(part)
        entries[composite] = (
            functools.reduce(RecRel.union, parts) if parts else empty
        )
    return _finish(protocol, table, entries, threads)


# Certificates.


def _check_initial(
    protocol: Protocol, entries: dict[types.CompositeState, RecRel]
) -> GlobalState:
    start = initial_state(protocol)
    if not entries[start.composite].member(start.contents):
        raise HypothesisError(
            "Malformed certificate: the entry of the initial composite state "
            f"({','.join(start.composite)}) excludes the empty channels"
        )
    return start


@cfsm_verify_export("cfsm_verify.proofs.prove_unreachable")
def prove_unreachable(
    protocol: Protocol, table: RecognizableTable, target: GlobalState
) -> Certificate:
    """Whether a consistent full table shows `target` is unreachable.

    It does iff the initial state is in the table and `target` is not.

    Raises:
        HypothesisError: if the initial state is not in the table.
        ValueError: if the table is partial or lacks an entry.
    """
    entries = _full_entries(protocol, table)
    _check_initial(protocol, entries)
    shown = target.format(protocol)
    if target.composite not in entries:
        raise ValueError(
            f"{shown} does not have a composite state of {protocol.name!r}"
        )
    if entries[target.composite].member(target.contents):
        return Certificate(
            False,
            f"the table contains {shown}",
            target.composite,
            target.contents,
        )
    return Certificate(
        True,
        f"the table excludes {shown}, so it is unreachable",
        target.composite,
    )


@cfsm_verify_export("cfsm_verify.proofs.prove_no_arrival")
def prove_no_arrival(
    protocol: Protocol,
    table: RecognizableTable,
    state: types.StateName,
    symbol: types.Symbol,
    channel: types.ChannelId,
) -> Certificate:
    """Whether a consistent full table shows `symbol` never arrives.

    The symbol arrives at `state` of the head of `channel` if it can be at
    the head of the channel while that node is in `state`. The table rules
    this out iff the initial state is in the table and no entry with the
    node in `state` has a vector whose `channel` word starts with
    `symbol`.

    Raises:
        HypothesisError: if the initial state is not in the table.
        ValueError: if the table is partial, or `state` is not a state of
            the head of `channel`.
    """
    head = protocol.channel(channel).head
    i = protocol.node_index(head)
    if state not in protocol.machine(head).states:
        raise ValueError(
            f"Node {head} (the head of {channel!r}) has no state {state!r}"
        )
    entries = _full_entries(protocol, table)
    _check_initial(protocol, entries)
    if symbol not in protocol.alphabet(channel):
        return Certificate(
            False,
            f"{symbol!r} is not in the alphabet of {channel!r}: "
            f"{list(protocol.alphabet(channel))}",
        )
    c = protocol.channel_index(channel)
    for composite, relation in entries.items():
        if composite[i] != state:
            continue
        rest = relation.quotient_channel(channel, symbol).witness()
        if rest is not None:
            contents = list(rest)
            contents[c] = (symbol,) + contents[c]
            return Certificate(
                False,
                f"the entry of ({','.join(composite)}) admits {symbol!r} at "
                f"the head of {channel!r}",
                composite,
                tuple(contents),
            )
    return Certificate(
        True,
        f"no entry with node {head} in {state} admits {symbol!r} at the "
        f"head of {channel!r}",
    )
