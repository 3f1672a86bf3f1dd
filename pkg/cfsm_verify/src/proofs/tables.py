"""Proof tables and the verdicts of checking them.

A proof table assigns to every composite state a set of channel contents:
a regular language over one designated channel (for cyclic protocols,
where all other channels are empty), or a recognizable relation over all
channels. A table is consistent when every global transition leads from a
member of its source entry to a member of its target entry.

Tables may be partial. A table indexed by per-node state sets `V_j` only
declares the entries on their product; a feedback table only declares the
entries on a set of composite states meeting every cycle of the product
graph. The remaining entries are computed by extension.
"""

import concurrent.futures
import dataclasses
import itertools
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

from absl import logging

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.errors import HypothesisError
from cfsm_verify.src.lang.dfa import Dfa
from cfsm_verify.src.lang.recrel import RecRel
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.protocol import Transition

VSets = Mapping[types.NodeId, frozenset[types.StateName]]

# `(S, S', i, t)`: node `i` moves `S` to `S'` by `t`.
Move = tuple[types.CompositeState, types.CompositeState, int, Transition]


def _freeze_v_sets(v_sets: Optional[VSets]) -> Optional[VSets]:
    if v_sets is None:
        return None
    return {node: frozenset(states) for node, states in v_sets.items()}


@cfsm_verify_export("cfsm_verify.proofs.RegularTable")
@dataclasses.dataclass(frozen=True)
class RegularTable:
    """Sets `Q(S)` of contents of one channel, the others being empty.

    Args:
        channel: The designated channel.
        alphabet: Its message alphabet; every entry is a Dfa over it.
        entries: The declared sets.
        v_sets: For a partial table, the per-node state sets whose product
            indexes the declared entries.
        default_empty: Whether undeclared entries (inside the index set of
            a partial table) are the empty set.
    """

    channel: types.ChannelId
    alphabet: tuple[types.Symbol, ...]
    entries: Mapping[types.CompositeState, Dfa]
    v_sets: Optional[VSets] = None
    default_empty: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphabet", tuple(sorted(self.alphabet)))
        object.__setattr__(self, "entries", dict(self.entries))
        object.__setattr__(self, "v_sets", _freeze_v_sets(self.v_sets))
        for composite, dfa in self.entries.items():
            if dfa.alphabet != self.alphabet:
                raise ValueError(
                    f"Entry {','.join(composite)} is over {dfa.alphabet}, "
                    f"the channel {self.channel!r} over {self.alphabet}"
                )

    @property
    def is_partial(self) -> bool:
        return self.v_sets is not None

    def entry(self, composite: types.CompositeState) -> Optional[Dfa]:
        """The set at `composite`; `None` if it is not declared."""
        found = self.entries.get(tuple(composite))
        if found is None and self.default_empty:
            return Dfa.empty(self.alphabet)
        return found


@cfsm_verify_export("cfsm_verify.proofs.RecognizableTable")
@dataclasses.dataclass(frozen=True)
class RecognizableTable:
    """Relations `R(S)` over the contents of all channels.

    Args:
        channels: The channel names in protocol order.
        alphabets: The channel alphabets in the same order.
        entries: The declared relations.
        v_sets: For a partial table indexed by a product of per-node state
            sets, those sets.
        feedback: For a partial table indexed by a feedback vertex set of
            the product graph, that set.
        default_empty: Whether undeclared entries (inside the index set of
            a partial table) are the empty relation.
    """

    channels: tuple[types.ChannelId, ...]
    alphabets: tuple[tuple[types.Symbol, ...], ...]
    entries: Mapping[types.CompositeState, RecRel]
    v_sets: Optional[VSets] = None
    feedback: Optional[frozenset[types.CompositeState]] = None
    default_empty: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(
            self, "alphabets", tuple(tuple(sorted(a)) for a in self.alphabets)
        )
        object.__setattr__(self, "entries", dict(self.entries))
        object.__setattr__(self, "v_sets", _freeze_v_sets(self.v_sets))
        if self.feedback is not None:
            object.__setattr__(
                self, "feedback", frozenset(tuple(s) for s in self.feedback)
            )
        if self.v_sets is not None and self.feedback is not None:
            raise ValueError(
                "A table is indexed by `v_sets` or by `feedback`, not both"
            )
        for composite, relation in self.entries.items():
            if relation.channels != self.channels:
                raise ValueError(
                    f"Entry {','.join(composite)} is over the channels "
                    f"{relation.channels}, the table over {self.channels}"
                )

    @property
    def is_partial(self) -> bool:
        return self.v_sets is not None or self.feedback is not None

    def empty_relation(self) -> RecRel:
        return RecRel.empty(self.channels, self.alphabets)

    def entry(self, composite: types.CompositeState) -> Optional[RecRel]:
        """The relation at `composite`; `None` if it is not declared."""
        found = self.entries.get(tuple(composite))
        if found is None and self.default_empty:
            return self.empty_relation()
        return found


@cfsm_verify_export("cfsm_verify.proofs.Restriction")
@dataclasses.dataclass(frozen=True)
class Restriction:
    """Channel contents where some clause's length caps all hold.

    Args:
        clauses: One cap per channel per clause; `None` is unbounded.
    """

    clauses: tuple[tuple[types.LengthCap, ...], ...]

    def __post_init__(self) -> None:
        clauses = tuple(tuple(c) for c in self.clauses)
        if not clauses:
            raise ValueError("`clauses` must contain at least one clause")
        for clause in clauses:
            if any(cap is not None and cap < 0 for cap in clause):
                raise ValueError(
                    f"Length caps must be nonnegative, received {clause}"
                )
        object.__setattr__(self, "clauses", clauses)

    def admits(self, contents: types.Contents) -> bool:
        return any(
            all(cap is None or len(w) <= cap for w, cap in zip(contents, c))
            for c in self.clauses
        )

    def relation(
        self,
        channels: Sequence[types.ChannelId],
        alphabets: Sequence[Iterable[types.Symbol]],
    ) -> RecRel:
        return RecRel.full(channels, alphabets).restrict_lengths(self.clauses)


@cfsm_verify_export("cfsm_verify.proofs.Violation")
@dataclasses.dataclass(frozen=True, order=True)
class Violation:
    """A failed inclusion between two entries of a table.

    Attributes:
        source: The composite state whose entry is transformed.
        target: The composite state whose entry should include the result.
        step: The transition or H-edge, as text.
        witness: A word or content vector in the transformed source entry
            but not in the target entry.
    """

    source: types.CompositeState
    target: types.CompositeState
    step: str
    witness: Any = dataclasses.field(compare=False, default=None)

    def __str__(self) -> str:
        return (
            f"({','.join(self.source)}) --{self.step}--> "
            f"({','.join(self.target)}): {self.witness!r} is missing"
        )


@cfsm_verify_export("cfsm_verify.proofs.Consistency")
@dataclasses.dataclass(frozen=True)
class Consistency:
    """The outcome of a consistency check.

    Attributes:
        violations: Every failed inclusion, sorted.
        checked: The number of inclusions checked.
    """

    violations: tuple[Violation, ...]
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


@cfsm_verify_export("cfsm_verify.proofs.Extension")
@dataclasses.dataclass(frozen=True)
class Extension:
    """A partial table completed to all composite states, and its check.

    The completion holds the smallest entries any consistent extension
    must contain, so the partial table can be extended iff `table` is
    consistent.
    """

    table: Any
    consistency: Consistency

    @property
    def extended(self) -> bool:
        return self.consistency.ok


@cfsm_verify_export("cfsm_verify.proofs.Certificate")
@dataclasses.dataclass(frozen=True)
class Certificate:
    """Whether a consistent table proves a property.

    Attributes:
        certified: Whether the table proves it.
        reason: Why, or why the table is silent.
        composite: The composite state the reason refers to, if any.
        witness: A word or content vector that keeps the table silent.
    """

    certified: bool
    reason: str
    composite: Optional[types.CompositeState] = None
    witness: Any = None


# Obligations.

# `(source, target, step, check)`: `check()` returns `None` or a witness.
Obligation = tuple[
    types.CompositeState,
    types.CompositeState,
    str,
    Callable[[], Any],
]


def check_obligations(
    obligations: Sequence[Obligation], threads: int = 1
) -> Consistency:
    """Runs independent inclusion checks, in parallel if `threads > 1`.

    The result does not depend on `threads`.
    """
    if threads < 1:
        raise ValueError(f"`threads` must be positive, received {threads}")

    def run(obligation: Obligation) -> Optional[Violation]:
        source, target, step, check = obligation
        witness = check()
        if witness is None:
            return None
        return Violation(source, target, step, witness)

    if threads == 1:
        outcomes = [run(o) for o in obligations]
    else:
        with concurrent.futures.ThreadPoolExecutor(threads) as pool:
            outcomes = list(pool.map(run, obligations))
    violations = tuple(sorted(v for v in outcomes if v is not None))
    logging.info(
        "Checked %d inclusions, %d violated", len(obligations), len(violations)
    )
    return Consistency(violations, len(obligations))


# Composite states.


def with_local(
    composite: types.CompositeState, i: int, state: types.StateName
) -> types.CompositeState:
    return composite[:i] + (state,) + composite[i + 1 :]


def local_moves(
    protocol: Protocol,
) -> Iterable[Move]:
    """Every `(S, S', i, t)` where node `i` moves `S` to `S'` by `t`."""
    for i, node in enumerate(protocol.nodes):
        machine = protocol.machine(node)
        others = [
            protocol.machine(n).states if j != i else (None,)
            for j, n in enumerate(protocol.nodes)
        ]
        for t in machine.transitions:
            for rest in itertools.product(*others):
                source = with_local(rest, i, t.source)
                yield source, with_local(rest, i, t.target), i, t


def step_text(node: types.NodeId, t: Transition) -> str:
    return f"node {node} {t.source} {t.action} {t.target}"


def index_set(
    protocol: Protocol, v_sets: VSets
) -> set[types.CompositeState]:
    """Checks the hypothesis on the sets `V_j` and returns their product.

    Every `V_j` must contain the initial state of node `j` and the target
    of every send of node `j`.

    Raises:
        HypothesisError: if a node has no set or a set is too small.
        ValueError: if a set names unknown nodes or states.
    """
    unknown = set(v_sets) - set(protocol.nodes)
    if unknown:
        raise ValueError(f"`v_sets` names unknown nodes {sorted(unknown)}")
    ordered = []
    for node in protocol.nodes:
        if node not in v_sets:
            raise HypothesisError(f"No state set is given for node {node}")
        machine = protocol.machine(node)
        states = v_sets[node]
        strange = states - set(machine.states)
        if strange:
            raise ValueError(
                f"Node {node} has no states {sorted(strange)}"
            )
        needed = {machine.initial} | {
            t.target for t in machine.transitions if t.action.is_send
        }
        missing = needed - states
        if missing:
            raise HypothesisError(
                f"The state set of node {node} must contain the initial "
                f"state and every send target; it lacks {sorted(missing)}"
            )
        ordered.append([s for s in machine.states if s in states])
    return set(itertools.product(*ordered))
