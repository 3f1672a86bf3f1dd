import collections
import dataclasses
import functools
import itertools
import math
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from cfsm_verify.src import config
from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.errors import AlphabetMismatchError
from cfsm_verify.src.errors import ChannelMismatchError
from cfsm_verify.src.errors import ParseError
from cfsm_verify.src.errors import RelationTooLargeError
from cfsm_verify.src.lang import regex
from cfsm_verify.src.lang.dfa import Dfa
from cfsm_verify.src.lang.dfa import crawl
from cfsm_verify.src.lang.dfa import moore_refine
from cfsm_verify.src.lang.nfa import compile_regex

Vector = tuple[int, ...]


def _check_size(count: int, what: str) -> None:
    cap = config.max_relation_vectors()
    if count > cap:
        raise RelationTooLargeError(
            f"{what} needs {count} acceptance vectors, more than the cap of "
            f"{cap}; raise it with "
            "`cfsm_verify.config.set_max_relation_vectors`"
        )


def _tracker(dfas: Sequence[Dfa]) -> tuple[Dfa, list[tuple[int, ...]]]:
    """Runs several Dfas over one alphabet in lockstep.

    Returns:
        A Dfa whose states are the reachable tuples of component states (its
        own acceptance is meaningless), and the tuple for each state.
    """
    alphabet = dfas[0].alphabet
    for dfa in dfas:
        if dfa.alphabet != alphabet:
            raise AlphabetMismatchError(
                f"Alphabets differ: {alphabet} and {dfa.alphabet}"
            )

    def follow(state: tuple[int, ...], symbol: str) -> tuple[int, ...]:
        return tuple(d.step(q, symbol) for d, q in zip(dfas, state))

    return crawl(
        alphabet, tuple(d.start for d in dfas), lambda _: False, follow
    )


def _vectors(choices: Sequence[Sequence[int]]) -> Iterable[Vector]:
    _check_size(math.prod(len(c) for c in choices), "A product term")
    return itertools.product(*choices)


@cfsm_verify_export("cfsm_verify.lang.RecRel")
@dataclasses.dataclass(frozen=True, eq=False)
class RecRel:
    """A recognizable relation over channel contents.

    A content vector `(x_1, ..., x_k)` (one word per channel) is a member
    iff the vector of states `(dfas[0].run(x_1), ..., dfas[k-1].run(x_k))`
    is in `accepting`. The acceptance flags of the channel Dfas themselves
    are not used.

    Every recognizable relation is a finite union of products of regular
    languages; `from_products` and `to_products` convert between the two
    forms without loss.

    Args:
        channels: The channel names, in protocol declaration order.
        dfas: One complete Dfa per channel.
        accepting: The accepted state vectors.
    """

    channels: tuple[types.ChannelId, ...]
    dfas: tuple[Dfa, ...]
    accepting: frozenset[Vector]

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "dfas", tuple(self.dfas))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        if len(self.channels) != len(self.dfas):
            raise ValueError(
                f"Got {len(self.dfas)} `dfas` for {len(self.channels)} "
                "`channels`"
            )
        _check_size(len(self.accepting), "A relation")
        sizes = [d.num_states for d in self.dfas]
        for vector in self.accepting:
            if len(vector) != len(sizes) or not all(
                0 <= q < n for q, n in zip(vector, sizes)
            ):
                raise ValueError(
                    f"Acceptance vector {vector} does not fit Dfas with "
                    f"{sizes} states"
                )

    def __repr__(self) -> str:
        return (
            f"RecRel(channels={self.channels}, "
            f"states={[d.num_states for d in self.dfas]}, "
            f"vectors={len(self.accepting)})"
        )

    @property
    def alphabets(self) -> tuple[tuple[types.Symbol, ...], ...]:
        return tuple(d.alphabet for d in self.dfas)

    # Constructors.

    @classmethod
    def full(
        cls,
        channels: Sequence[types.ChannelId],
        alphabets: Sequence[Iterable[types.Symbol]],
    ) -> "RecRel":
        dfas = tuple(Dfa.universal(a) for a in alphabets)
        return cls(tuple(channels), dfas, frozenset({(0,) * len(dfas)}))

    @classmethod
    def empty(
        cls,
        channels: Sequence[types.ChannelId],
        alphabets: Sequence[Iterable[types.Symbol]],
    ) -> "RecRel":
        dfas = tuple(Dfa.universal(a) for a in alphabets)
        return cls(tuple(channels), dfas, frozenset())

    @classmethod
    def from_products(
        cls,
        channels: Sequence[types.ChannelId],
        alphabets: Sequence[Iterable[types.Symbol]],
        terms: Iterable[Sequence[Dfa]],
    ) -> "RecRel":
        """The union of the products `L(t[0]) × ... × L(t[k-1])`.

        Args:
            channels: The channel names.
            alphabets: One alphabet per channel; each Dfa of a term must
                have its channel's alphabet.
            terms: The product terms, one Dfa per channel each.
        """
        channels = tuple(channels)
        alphabets = [tuple(sorted(set(a))) for a in alphabets]
        terms = [tuple(t) for t in terms]
        for term in terms:
            if len(term) != len(channels):
                raise ChannelMismatchError(
                    f"Term has {len(term)} components for {len(channels)} "
                    "channels"
                )
        if not terms:
            return cls.empty(channels, alphabets)
        dfas = []
        accepted_states: list[list[list[int]]] = [[] for _ in terms]
        for c, alphabet in enumerate(alphabets):
            distinct = list(dict.fromkeys(term[c] for term in terms))
            for dfa in distinct:
                if dfa.alphabet != alphabet:
                    raise AlphabetMismatchError(
                        f"Channel {channels[c]!r} has alphabet {alphabet}, "
                        f"received a Dfa over {dfa.alphabet}"
                    )
            tracker, states = _tracker(distinct)
            dfas.append(tracker)
            position = {dfa: i for i, dfa in enumerate(distinct)}
            for t, term in enumerate(terms):
                k = position[term[c]]
                accepted_states[t].append(
                    [
                        i
                        for i, state in enumerate(states)
                        if term[c].accepting[state[k]]
                    ]
                )
        accepting: set[Vector] = set()
        for choices in accepted_states:
            accepting.update(_vectors(choices))
            _check_size(len(accepting), "A union of products")
        return cls(channels, tuple(dfas), frozenset(accepting))

    @classmethod
    def from_contents(
        cls,
        channels: Sequence[types.ChannelId],
        alphabets: Sequence[Iterable[types.Symbol]],
        contents: Iterable[types.Contents],
    ) -> "RecRel":
        """The finite relation with exactly the given content vectors."""
        channels = tuple(channels)
        contents = [tuple(tuple(w) for w in v) for v in contents]
        dfas = []
        for c, alphabet in enumerate(alphabets):
            words = {v[c] for v in contents}
            prefixes = {w[:i] for w in words for i in range(len(w) + 1)}

            def follow(
                prefix: Optional[types.Word],
                symbol: str,
                prefixes: set[types.Word] = prefixes,
            ) -> Optional[types.Word]:
                if prefix is None or prefix + (symbol,) not in prefixes:
                    return None
                return prefix + (symbol,)

            dfa, _ = crawl(
                tuple(sorted(set(alphabet))), (), lambda _: False, follow
            )
            dfas.append(dfa)
        accepting = frozenset(
            tuple(d.run(w) for d, w in zip(dfas, v)) for v in contents
        )
        return cls(channels, tuple(dfas), accepting)

    # Queries.

    def _check_compatible(self, other: "RecRel") -> None:
        if self.channels != other.channels:
            raise ChannelMismatchError(
                f"Channel lists differ: {self.channels} and {other.channels}"
            )
        if self.alphabets != other.alphabets:
            raise AlphabetMismatchError(
                f"Channel alphabets differ: {self.alphabets} and "
                f"{other.alphabets}"
            )

    def member(self, contents: Sequence[Iterable[types.Symbol]]) -> bool:
        """Whether the content vector (one word per channel) is a member."""
        if len(contents) != len(self.dfas):
            raise ChannelMismatchError(
                f"Got {len(contents)} channel contents for "
                f"{len(self.dfas)} channels"
            )
        vector = tuple(d.run(w) for d, w in zip(self.dfas, contents))
        return vector in self.accepting

    @functools.cached_property
    def _reachable(self) -> tuple[np.ndarray, ...]:
        return tuple(d.reachable() for d in self.dfas)

    def _live(self) -> Iterable[Vector]:
        masks = self._reachable
        for vector in self.accepting:
            if all(mask[q] for mask, q in zip(masks, vector)):
                yield vector

    def is_empty(self) -> bool:
        return next(iter(self._live()), None) is None

    def witness(self) -> Optional[types.Contents]:
        """Some member, built from shortest words, or `None` if empty."""
        access = [d.access_words() for d in self.dfas]
        best: Optional[types.Contents] = None
        for vector in sorted(self._live()):
            contents = tuple(a[q] for a, q in zip(access, vector))
            key = (sum(len(w) for w in contents), contents)
            if best is None or key < (sum(len(w) for w in best), best):
                best = contents
        return best

    def enumerate(self, max_len: int) -> set[types.Contents]:
        """All members whose every channel word has length `<= max_len`."""
        by_state = []
        for dfa in self.dfas:
            groups: dict[int, list[types.Word]] = collections.defaultdict(
                list
            )
            for word in dfa.universal(dfa.alphabet).words(max_len):
                groups[dfa.run(word)].append(word)
            by_state.append(groups)
        result: set[types.Contents] = set()
        for vector in self.accepting:
            choices = [g.get(q, []) for g, q in zip(by_state, vector)]
            result.update(itertools.product(*choices))
        return result

    # Boolean algebra.

    def _paired(
        self, other: "RecRel"
    ) -> tuple[tuple[Dfa, ...], set[Vector], set[Vector]]:
        self._check_compatible(other)
        dfas = []
        lookups: list[tuple[dict[int, list[int]], dict[int, list[int]]]] = []
        for d1, d2 in zip(self.dfas, other.dfas):
            pair, states = _tracker([d1, d2])
            dfas.append(pair)
            left = collections.defaultdict(list)
            right = collections.defaultdict(list)
            for i, (q1, q2) in enumerate(states):
                left[q1].append(i)
                right[q2].append(i)
            lookups.append((left, right))
        preimages: list[set[Vector]] = []
        for side, relation in enumerate((self, other)):
            image: set[Vector] = set()
            for vector in relation.accepting:
                image.update(
                    _vectors(
                        [
                            lookup[side].get(q, [])
                            for lookup, q in zip(lookups, vector)
                        ]
                    )
                )
                _check_size(len(image), "A paired relation")
            preimages.append(image)
        return tuple(dfas), preimages[0], preimages[1]

    def union(self, other: "RecRel") -> "RecRel":
        dfas, left, right = self._paired(other)
        return RecRel(self.channels, dfas, frozenset(left | right)).reduced()

    def intersect(self, other: "RecRel") -> "RecRel":
        dfas, left, right = self._paired(other)
        return RecRel(self.channels, dfas, frozenset(left & right)).reduced()

    def difference(self, other: "RecRel") -> "RecRel":
        dfas, left, right = self._paired(other)
        return RecRel(self.channels, dfas, frozenset(left - right)).reduced()

    def complement(self) -> "RecRel":
        reduced = self.reduced()
        sizes = [d.num_states for d in reduced.dfas]
        _check_size(math.prod(sizes), "The complement")
        everything = itertools.product(*(range(n) for n in sizes))
        accepting = frozenset(everything) - reduced.accepting
        return RecRel(self.channels, reduced.dfas, accepting)

    def includes(self, other: "RecRel") -> bool:
        """Whether every member of `other` is a member of `self`."""
        return other.difference(self).is_empty()

    def inclusion_witness(self, other: "RecRel") -> Optional[types.Contents]:
        """A member of `other` that is not a member of `self`, or `None`."""
        return other.difference(self).witness()

    def equivalent(self, other: "RecRel") -> bool:
        return self.includes(other) and other.includes(self)

    def reduced(self) -> "RecRel":
        """An equivalent relation with per-channel states merged.

        Two states of a channel Dfa are merged when they induce the same
        acceptance slices and stay so under every transition.
        """
        dfas = []
        mappings = []
        for dfa in self.dfas:
            trimmed, mapping = dfa.trim()
            dfas.append(trimmed)
            mappings.append(mapping)
        accepting = {
            tuple(int(m[q]) for m, q in zip(mappings, vector))
            for vector in self.accepting
        }
        accepting = {v for v in accepting if min(v, default=0) >= 0}
        changed = True
        while changed:
            changed = False
            for c, dfa in enumerate(dfas):
                slices: dict[int, set[Vector]] = collections.defaultdict(set)
                for vector in accepting:
                    slices[vector[c]].add(vector[:c] + vector[c + 1 :])
                keys: dict[frozenset[Vector], int] = {}
                labels = np.array(
                    [
                        keys.setdefault(
                            frozenset(slices.get(q, ())), len(keys)
                        )
                        for q in range(dfa.num_states)
                    ]
                )
                labels = moore_refine(dfa.table, labels)
                if labels.max() + 1 == dfa.num_states:
                    continue
                dfas[c], mapping = dfa.merge_states(labels)
                accepting = {
                    v[:c] + (int(mapping[v[c]]),) + v[c + 1 :]
                    for v in accepting
                }
                changed = True
        return RecRel(self.channels, tuple(dfas), frozenset(accepting))

    # Channel transforms.

    def _channel(self, channel: types.ChannelId) -> int:
        try:
            return self.channels.index(channel)
        except ValueError:
            raise ChannelMismatchError(
                f"Unknown channel {channel!r}; channels are {self.channels}"
            ) from None

    def _replace(
        self, c: int, dfa: Dfa, accepting: Iterable[Vector]
    ) -> "RecRel":
        dfas = self.dfas[:c] + (dfa,) + self.dfas[c + 1 :]
        return RecRel(self.channels, dfas, frozenset(accepting))

    def quotient_channel(
        self, channel: types.ChannelId, symbol: types.Symbol
    ) -> "RecRel":
        """Contents `C'` such that `x_ch = symbol·x'_ch` for a member `C`.

        The other channels are unchanged.
        """
        c = self._channel(channel)
        dfa = self.dfas[c]
        return self._replace(c, dfa.quotient_symbol(symbol), self.accepting)

    def append_channel(
        self, channel: types.ChannelId, symbol: types.Symbol
    ) -> "RecRel":
        """Contents `C'` with `x'_ch = x_ch·symbol` for a member `C`.

        The channel Dfa is rebuilt over pairs `(state, previous)` where
        `previous` is the state before the last symbol if that symbol was
        `symbol`, and `-1` otherwise; this keeps the result exact.
        """
        c = self._channel(channel)
        dfa = self.dfas[c]
        b = dfa.index(symbol)

        def follow(state: tuple[int, int], s: str) -> tuple[int, int]:
            q, _ = state
            i = dfa.index(s)
            return int(dfa.table[q, i]), q if i == b else -1

        tracker, states = crawl(
            dfa.alphabet, (dfa.start, -1), lambda _: False, follow
        )
        position = {state: i for i, state in enumerate(states)}
        accepting = []
        for vector in self.accepting:
            previous = vector[c]
            target = position.get((int(dfa.table[previous, b]), previous))
            if target is not None:
                accepting.append(vector[:c] + (target,) + vector[c + 1 :])
        return self._replace(c, tracker, accepting)

    def quotient_languages(
        self, languages: Mapping[types.ChannelId, Dfa]
    ) -> "RecRel":
        """`{C' | ∃x_ch ∈ languages[ch]: (x_ch·x'_ch)_ch ∈ self}`.

        Channels not in `languages` are quotiented by `{λ}`.
        """
        result = self
        for channel, language in languages.items():
            c = self._channel(channel)
            dfa = result.dfas[c]
            if language.alphabet != dfa.alphabet:
                raise AlphabetMismatchError(
                    f"Channel {channel!r} has alphabet {dfa.alphabet}, "
                    f"received a language over {language.alphabet}"
                )
            starts = sorted(_reached_by(dfa, language))
            if not starts:
                return RecRel(
                    self.channels, result.dfas, frozenset()
                )
            tracker, states = _tracker([dfa.with_start(s) for s in starts])
            by_component: list[dict[int, list[int]]] = [
                collections.defaultdict(list) for _ in starts
            ]
            for i, state in enumerate(states):
                for k, q in enumerate(state):
                    by_component[k][q].append(i)
            accepting: set[Vector] = set()
            for vector in result.accepting:
                for k in range(len(starts)):
                    for i in by_component[k].get(vector[c], []):
                        accepting.add(vector[:c] + (i,) + vector[c + 1 :])
            _check_size(len(accepting), "A channel quotient")
            result = result._replace(c, tracker, accepting)
        return result

    def restrict_lengths(
        self, clauses: Sequence[Sequence[types.LengthCap]]
    ) -> "RecRel":
        """Intersects with "some clause's length caps all hold".

        Args:
            clauses: One cap per channel per clause; `None` is unbounded.
        """
        if not clauses:
            raise ValueError("`clauses` must contain at least one clause")
        for clause in clauses:
            if len(clause) != len(self.channels):
                raise ChannelMismatchError(
                    f"Clause {tuple(clause)} does not have one cap per "
                    f"channel {self.channels}"
                )
            if all(cap is None for cap in clause):
                return self
        terms = [
            [
                Dfa.universal(d.alphabet)
                if cap is None
                else Dfa.length_at_most(d.alphabet, cap)
                for d, cap in zip(self.dfas, clause)
            ]
            for clause in clauses
        ]
        restriction = RecRel.from_products(
            self.channels, self.alphabets, terms
        )
        return self.intersect(restriction)

    # Conversion.

    def to_products(self) -> list[tuple[Dfa, ...]]:
        """Mezei form: a list of product terms whose union is `self`."""
        reduced = self.reduced()
        terms = []
        for vector in sorted(reduced.accepting):
            term = []
            for dfa, q in zip(reduced.dfas, vector):
                accepting = np.zeros(dfa.num_states, dtype=bool)
                accepting[q] = True
                term.append(
                    Dfa(dfa.alphabet, dfa.table, accepting, dfa.start)
                    .minimize()
                )
            terms.append(tuple(term))
        return terms


def _reached_by(dfa: Dfa, language: Dfa) -> set[int]:
    """States of `dfa` reached from its start by some word of `language`."""
    seen = {(dfa.start, language.start)}
    queue = collections.deque(seen)
    reached = set()
    while queue:
        q, r = queue.popleft()
        if language.accepting[r]:
            reached.add(q)
        for i in range(len(dfa.alphabet)):
            pair = (int(dfa.table[q, i]), int(language.table[r, i]))
            if pair not in seen:
                seen.add(pair)
                queue.append(pair)
    return reached


@cfsm_verify_export("cfsm_verify.lang.rel_minus_quotient")
def rel_minus_quotient(relation: RecRel, language: Dfa) -> RecRel:
    """`{(x, y) | ∃z: z·x ∈ L(language) and (z, y) ∈ relation}`.

    The result is `⋃ L(language from p) × B_p` over the states `p` that
    `language` reaches together with a first-channel state `a` of
    `relation`, where `B_p` collects the second components accepted with
    such an `a`.

    Args:
        relation: A relation over exactly two channels.
        language: A Dfa over the first channel's alphabet.
    """
    if len(relation.channels) != 2:
        raise ChannelMismatchError(
            "`relation` must have exactly two channels, received "
            f"{relation.channels}"
        )
    first, second = relation.dfas
    if language.alphabet != first.alphabet:
        raise AlphabetMismatchError(
            f"`language` is over {language.alphabet}, the first channel "
            f"over {first.alphabet}"
        )
    pairs = {(language.start, first.start)}
    queue = collections.deque(pairs)
    while queue:
        p, a = queue.popleft()
        for i in range(len(first.alphabet)):
            pair = (int(language.table[p, i]), int(first.table[a, i]))
            if pair not in pairs:
                pairs.add(pair)
                queue.append(pair)
    second_by_first: dict[int, set[int]] = collections.defaultdict(set)
    for a, q in relation.accepting:
        second_by_first[a].add(q)
    terms = []
    for p in sorted({p for p, _ in pairs}):
        accepted = set()
        for a in {a for p2, a in pairs if p2 == p}:
            accepted |= second_by_first.get(a, set())
        if not accepted:
            continue
        mask = np.zeros(second.num_states, dtype=bool)
        mask[sorted(accepted)] = True
        terms.append(
            (
                language.with_start(p),
                Dfa(second.alphabet, second.table, mask, second.start),
            )
        )
    return RecRel.from_products(
        relation.channels, relation.alphabets, terms
    ).reduced()


def _split_top_level(
    text: str, separator: str, start: int
) -> list[tuple[str, int]]:
    parts = []
    depth = 0
    begin = 0
    for i, char in enumerate(text):
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("Unbalanced ')'", position=start + i)
        elif char == separator and depth == 0:
            parts.append((text[begin:i], start + begin))
            begin = i + 1
    if depth != 0:
        raise ParseError("Unbalanced '('", position=start + len(text))
    parts.append((text[begin:], start + begin))
    return parts


@cfsm_verify_export("cfsm_verify.lang.parse_relation")
def parse_relation(
    text: str,
    channels: Sequence[types.ChannelId],
    alphabets: Sequence[Iterable[types.Symbol]],
) -> RecRel:
    """Parses `empty` or a sum of tuples `(R1, ..., Rk) + (...)`.

    Each `Ri` is a regular expression over the i-th channel's alphabet.

    Example:

    ```python
    parse_relation(
        "(ED* . EV*, ED*) + (EV*, eps)", ["a", "b"], [{"ED", "EV"}, {"ED"}]
    )
    ```
    """
    alphabets = [frozenset(a) for a in alphabets]
    if text.strip() == "empty":
        return RecRel.empty(channels, alphabets)
    terms = []
    for term_text, offset in _split_top_level(text, "+", 0):
        stripped = term_text.strip()
        lead = offset + term_text.index(stripped[0]) if stripped else offset
        if not (stripped.startswith("(") and stripped.endswith(")")):
            raise ParseError(
                "Expected a parenthesized tuple of expressions", position=lead
            )
        components = _split_top_level(stripped[1:-1], ",", lead + 1)
        if len(components) != len(channels):
            raise ParseError(
                f"Tuple has {len(components)} components for "
                f"{len(channels)} channels",
                position=lead,
            )
        term = []
        for (component, position), alphabet in zip(components, alphabets):
            try:
                node = regex.parse_regex(component, alphabet)
            except ParseError as e:
                raise type(e)(
                    e.message, position=position + (e.position or 0)
                ) from e
            term.append(compile_regex(node, alphabet))
        terms.append(term)
    return RecRel.from_products(channels, alphabets, terms).reduced()


@cfsm_verify_export("cfsm_verify.lang.relation_to_text")
def relation_to_text(relation: RecRel) -> str:
    """Prints a relation in the syntax `parse_relation` reads."""
    terms = relation.to_products()
    if not terms:
        return "empty"
    return " + ".join(
        "("
        + ", ".join(regex.to_text(regex.to_regex(dfa)) for dfa in term)
        + ")"
        for term in terms
    )
