import collections
import dataclasses
import functools
from typing import (
    Any,
    Callable,
    Hashable,
    Iterable,
    Iterator,
    Optional,
    Sequence,
)

import numpy as np

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.errors import AlphabetMismatchError


def crawl(
    alphabet: tuple[types.Symbol, ...],
    initial: Hashable,
    final: Callable[[Any], bool],
    follow: Callable[[Any, types.Symbol], Hashable],
) -> tuple["Dfa", list[Any]]:
    """Builds a complete Dfa by exploring `follow` from `initial`.

    States are numbered in breadth-first discovery order, symbols visited in
    alphabet order, so the result only depends on the language-level
    behaviour of `follow`.

    Returns:
        The Dfa and the list of explored states, indexed by Dfa state.
    """
    states = [initial]
    index = {initial: 0}
    rows = []
    i = 0
    while i < len(states):
        state = states[i]
        row = []
        for symbol in alphabet:
            target = follow(state, symbol)
            j = index.get(target)
            if j is None:
                j = len(states)
                index[target] = j
                states.append(target)
            row.append(j)
        rows.append(row)
        i += 1
    table = np.array(rows, dtype=np.int64).reshape(len(states), len(alphabet))
    accepting = np.array([bool(final(s)) for s in states], dtype=bool)
    return Dfa(alphabet, table, accepting, 0), states


def moore_refine(table: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Coarsest congruence of `table` refining the partition `labels`."""
    labels = np.unique(labels, return_inverse=True)[1].reshape(-1)
    while True:
        signature = np.column_stack([labels, labels[table]])
        refined = np.unique(signature, axis=0, return_inverse=True)[1]
        refined = refined.reshape(-1)
        if refined.max() == labels.max():
            return refined
        labels = refined


@cfsm_verify_export("cfsm_verify.lang.Dfa")
@dataclasses.dataclass(frozen=True, eq=False)
class Dfa:
    """A complete deterministic finite automaton.

    States are the integers `0..n-1`. `table[q, i]` is the successor of `q`
    on `alphabet[i]`; there is always an explicit sink when one is needed,
    so every operation is a total rewrite of the table.

    Instances are immutable and hash by structure. Two Dfas with the same
    language have structurally equal `minimize()` results.

    Args:
        alphabet: The symbols, sorted and without duplicates.
        table: Integer array of shape `(num_states, len(alphabet))`.
        accepting: Boolean array of shape `(num_states,)`.
        start: The initial state.

    Example:

    ```python
    dfa = cfsm_verify.lang.compile_regex(
        cfsm_verify.lang.parse_regex("ED* . EV*", {"ED", "EV"})
    )
    dfa.accepts(("ED", "EV"))  # True
    dfa.quotient_symbol("EV").accepts(("ED",))  # False
    ```
    """

    alphabet: tuple[types.Symbol, ...]
    table: np.ndarray
    accepting: np.ndarray
    start: int = 0

    def __post_init__(self) -> None:
        alphabet = tuple(self.alphabet)
        if list(alphabet) != sorted(set(alphabet)):
            raise ValueError(
                "`alphabet` must be sorted and free of duplicates, received "
                f"{alphabet}"
            )
        table = np.array(self.table, dtype=np.int64)
        accepting = np.array(self.accepting, dtype=bool)
        if accepting.ndim != 1 or accepting.shape[0] < 1:
            raise ValueError(
                "`accepting` must be a nonempty vector, received shape "
                f"{accepting.shape}"
            )
        n = accepting.shape[0]
        table = table.reshape(n, len(alphabet))
        if table.size and (table.min() < 0 or table.max() >= n):
            raise ValueError("`table` references a state out of range")
        if not 0 <= self.start < n:
            raise ValueError(
                f"`start` must be in [0, {n}), received {self.start}"
            )
        table.setflags(write=False)
        accepting.setflags(write=False)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "accepting", accepting)
        object.__setattr__(self, "start", int(self.start))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dfa):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return (
            f"Dfa(alphabet={self.alphabet}, num_states={self.num_states}, "
            f"start={self.start}, "
            f"accepting={np.flatnonzero(self.accepting).tolist()})"
        )

    @functools.cached_property
    def _key(self) -> tuple[Any, ...]:
        return (
            self.alphabet,
            self.start,
            self.table.shape,
            self.table.tobytes(),
            self.accepting.tobytes(),
        )

    @functools.cached_property
    def _symbol_index(self) -> dict[types.Symbol, int]:
        return {symbol: i for i, symbol in enumerate(self.alphabet)}

    @property
    def num_states(self) -> int:
        return int(self.accepting.shape[0])

    # Constructors.

    @classmethod
    def universal(cls, alphabet: Iterable[types.Symbol]) -> "Dfa":
        """The language of all words over `alphabet`."""
        alphabet = tuple(sorted(set(alphabet)))
        return cls(alphabet, np.zeros((1, len(alphabet))), [True])

    @classmethod
    def empty(cls, alphabet: Iterable[types.Symbol]) -> "Dfa":
        """The empty language."""
        alphabet = tuple(sorted(set(alphabet)))
        return cls(alphabet, np.zeros((1, len(alphabet))), [False])

    @classmethod
    def epsilon(cls, alphabet: Iterable[types.Symbol]) -> "Dfa":
        """The language `{λ}`."""
        return cls.from_words(alphabet, [()])

    @classmethod
    def from_words(
        cls, alphabet: Iterable[types.Symbol], words: Iterable[types.Word]
    ) -> "Dfa":
        """A finite language, given by its words."""
        alphabet = tuple(sorted(set(alphabet)))
        words = frozenset(tuple(w) for w in words)
        for word in words:
            unknown = set(word) - set(alphabet)
            if unknown:
                raise ValueError(
                    f"Word {word} uses symbols {sorted(unknown)} outside "
                    f"the alphabet {alphabet}"
                )
        prefixes = {w[:i] for w in words for i in range(len(w) + 1)}

        def follow(prefix: Optional[types.Word], symbol: str) -> Any:
            if prefix is None:
                return None
            longer = prefix + (symbol,)
            return longer if longer in prefixes else None

        dfa, _ = crawl(alphabet, (), lambda w: w in words, follow)
        return dfa.minimize()

    @classmethod
    def length_at_most(
        cls, alphabet: Iterable[types.Symbol], cap: int
    ) -> "Dfa":
        """All words of length at most `cap`."""
        if cap < 0:
            raise ValueError(f"`cap` must be nonnegative, received {cap}")
        alphabet = tuple(sorted(set(alphabet)))
        dfa, _ = crawl(
            alphabet, 0, lambda n: n <= cap, lambda n, _: min(n + 1, cap + 1)
        )
        return dfa

    @classmethod
    def starts_with(
        cls, alphabet: Iterable[types.Symbol], symbol: types.Symbol
    ) -> "Dfa":
        """All words whose first symbol is `symbol`."""
        alphabet = tuple(sorted(set(alphabet)))
        if symbol not in alphabet:
            raise ValueError(
                f"`symbol` {symbol!r} is not in the alphabet {alphabet}"
            )

        def follow(state: str, s: str) -> str:
            if state == "start":
                return "yes" if s == symbol else "no"
            return state

        dfa, _ = crawl(alphabet, "start", lambda s: s == "yes", follow)
        return dfa

    # Running.

    def index(self, symbol: types.Symbol) -> int:
        try:
            return self._symbol_index[symbol]
        except KeyError:
            raise ValueError(
                f"Symbol {symbol!r} is not in the alphabet {self.alphabet}"
            ) from None

    def step(self, state: int, symbol: types.Symbol) -> int:
        return int(self.table[state, self.index(symbol)])

    def run(
        self, word: Iterable[types.Symbol], state: Optional[int] = None
    ) -> int:
        """Returns the state reached by reading `word`."""
        current = self.start if state is None else state
        for symbol in word:
            current = int(self.table[current, self.index(symbol)])
        return current

    def accepts(self, word: Iterable[types.Symbol]) -> bool:
        return bool(self.accepting[self.run(word)])

    def with_start(self, state: int) -> "Dfa":
        """The right language of `state`."""
        return Dfa(self.alphabet, self.table, self.accepting, state)

    def reachable(self) -> np.ndarray:
        """Boolean mask of the states reachable from `start`."""
        seen = np.zeros(self.num_states, dtype=bool)
        seen[self.start] = True
        frontier = [self.start]
        while frontier:
            successors = np.unique(self.table[frontier].reshape(-1))
            fresh = successors[~seen[successors]]
            seen[fresh] = True
            frontier = fresh.tolist()
        return seen

    def trim(self) -> tuple["Dfa", np.ndarray]:
        """Drops unreachable states and renumbers the rest canonically.

        Returns:
            The trimmed Dfa and an array mapping each old state to its new
            number, or `-1` for dropped states.
        """
        order = [self.start]
        mapping = np.full(self.num_states, -1, dtype=np.int64)
        mapping[self.start] = 0
        i = 0
        while i < len(order):
            for target in self.table[order[i]].tolist():
                if mapping[target] < 0:
                    mapping[target] = len(order)
                    order.append(target)
            i += 1
        table = mapping[self.table[order]]
        return Dfa(self.alphabet, table, self.accepting[order], 0), mapping

    def minimize(self) -> "Dfa":
        """The canonical minimal Dfa for the same language."""
        return self._minimal

    @functools.cached_property
    def _minimal(self) -> "Dfa":
        trimmed, _ = self.trim()
        labels = moore_refine(trimmed.table, trimmed.accepting.astype(int))
        minimal, _ = trimmed.merge_states(labels)
        return minimal

    def merge_states(self, labels: np.ndarray) -> tuple["Dfa", np.ndarray]:
        """Quotients by a congruence given as one block label per state.

        `labels` must be a congruence of the transition table; acceptance is
        taken from an arbitrary member of each block.

        Returns:
            The quotient, trimmed and renumbered, and an array mapping each
            old state to its new number (`-1` if unreachable).
        """
        labels = np.unique(labels, return_inverse=True)[1].reshape(-1)
        blocks = int(labels.max()) + 1
        representative = np.zeros(blocks, dtype=np.int64)
        representative[labels[::-1]] = np.arange(self.num_states)[::-1]
        table = labels[self.table[representative]]
        accepting = self.accepting[representative]
        quotient = Dfa(
            self.alphabet, table, accepting, int(labels[self.start])
        )
        trimmed, mapping = quotient.trim()
        return trimmed, mapping[labels]

    # Boolean algebra.

    def _check_alphabet(self, other: "Dfa") -> None:
        if self.alphabet != other.alphabet:
            raise AlphabetMismatchError(
                f"Alphabets differ: {self.alphabet} and {other.alphabet}"
            )

    def product(
        self, other: "Dfa", op: Callable[[bool, bool], bool]
    ) -> "Dfa":
        """Synchronous product, accepting where `op(accept1, accept2)`."""
        self._check_alphabet(other)

        def follow(pair: tuple[int, int], symbol: str) -> tuple[int, int]:
            i = self._symbol_index[symbol]
            return int(self.table[pair[0], i]), int(other.table[pair[1], i])

        dfa, _ = crawl(
            self.alphabet,
            (self.start, other.start),
            lambda p: op(
                bool(self.accepting[p[0]]), bool(other.accepting[p[1]])
            ),
            follow,
        )
        return dfa

    def union(self, other: "Dfa") -> "Dfa":
        return self.product(other, lambda a, b: a or b)

    def intersect(self, other: "Dfa") -> "Dfa":
        return self.product(other, lambda a, b: a and b)

    def difference(self, other: "Dfa") -> "Dfa":
        return self.product(other, lambda a, b: a and not b)

    def complement(self) -> "Dfa":
        return Dfa(self.alphabet, self.table, ~self.accepting, self.start)

    def is_empty(self) -> bool:
        return not bool(self.accepting[self.reachable()].any())

    def is_universal(self) -> bool:
        return bool(self.accepting[self.reachable()].all())

    def shortest_word(self) -> Optional[types.Word]:
        """A shortest accepted word, or `None` if the language is empty."""
        parent: dict[int, tuple[int, str]] = {}
        seen = {self.start}
        queue = collections.deque([self.start])
        while queue:
            state = queue.popleft()
            if self.accepting[state]:
                word: list[str] = []
                while state != self.start:
                    previous, symbol = parent[state]
                    word.append(symbol)
                    state = previous
                return tuple(reversed(word))
            for i, symbol in enumerate(self.alphabet):
                target = int(self.table[state, i])
                if target not in seen:
                    seen.add(target)
                    parent[target] = (state, symbol)
                    queue.append(target)
        return None

    def access_words(self) -> dict[int, types.Word]:
        """A shortest word leading to each reachable state."""
        words: dict[int, types.Word] = {self.start: ()}
        queue = collections.deque([self.start])
        while queue:
            state = queue.popleft()
            for i, symbol in enumerate(self.alphabet):
                target = int(self.table[state, i])
                if target not in words:
                    words[target] = words[state] + (symbol,)
                    queue.append(target)
        return words

    def includes(self, other: "Dfa") -> bool:
        """Whether `L(other) ⊆ L(self)`."""
        return other.difference(self).is_empty()

    def inclusion_witness(self, other: "Dfa") -> Optional[types.Word]:
        """A shortest word of `L(other) \\ L(self)`, or `None`."""
        return other.difference(self).shortest_word()

    def equivalent(self, other: "Dfa") -> bool:
        self._check_alphabet(other)
        return self.minimize() == other.minimize()

    # Quotients and appends.

    def quotient_symbol(self, symbol: types.Symbol) -> "Dfa":
        """`{x | symbol·x ∈ L}`, by moving the start state along `symbol`."""
        return self.with_start(self.step(self.start, symbol))

    def append_symbol(self, symbol: types.Symbol) -> "Dfa":
        """`L·{symbol}`."""
        b = self.index(symbol)

        # State (q, flag): flag is set iff the last symbol read was `symbol`
        # and the state before reading it was accepting.
        def follow(state: tuple[int, bool], s: str) -> tuple[int, bool]:
            q, _ = state
            i = self._symbol_index[s]
            return int(self.table[q, i]), i == b and bool(self.accepting[q])

        dfa, _ = crawl(
            self.alphabet, (self.start, False), lambda s: s[1], follow
        )
        return dfa

    def quotient_language(self, other: "Dfa") -> "Dfa":
        """`{y | ∃x ∈ L(other): xy ∈ L(self)}`."""
        self._check_alphabet(other)
        seen = {(self.start, other.start)}
        queue = collections.deque(seen)
        starts = set()
        while queue:
            q, r = queue.popleft()
            if other.accepting[r]:
                starts.add(q)
            for i in range(len(self.alphabet)):
                pair = (int(self.table[q, i]), int(other.table[r, i]))
                if pair not in seen:
                    seen.add(pair)
                    queue.append(pair)
        if not starts:
            return Dfa.empty(self.alphabet)
        return union_from_states([(self, q) for q in sorted(starts)])

    # Enumeration.

    def words(self, max_len: int) -> Iterator[types.Word]:
        """Accepted words of length at most `max_len`, shortest first."""
        layer: list[tuple[int, types.Word]] = [(self.start, ())]
        for length in range(max_len + 1):
            for state, word in layer:
                if self.accepting[state]:
                    yield word
            if length == max_len:
                return
            layer = [
                (int(self.table[state, i]), word + (symbol,))
                for state, word in layer
                for i, symbol in enumerate(self.alphabet)
            ]


@cfsm_verify_export("cfsm_verify.lang.union_from_states")
def union_from_states(starts: Sequence[tuple[Dfa, int]]) -> Dfa:
    """Union of the right languages of the given `(dfa, state)` pairs.

    All Dfas must share one alphabet. An empty sequence is not allowed
    since the alphabet would be unknown.
    """
    if not starts:
        raise ValueError("`starts` must contain at least one pair")
    alphabet = starts[0][0].alphabet
    for dfa, _ in starts:
        if dfa.alphabet != alphabet:
            raise AlphabetMismatchError(
                f"Alphabets differ: {alphabet} and {dfa.alphabet}"
            )
    distinct = list(dict.fromkeys(dfa for dfa, _ in starts))
    offsets = np.cumsum([0] + [d.num_states for d in distinct])
    offset_of = {dfa: int(off) for dfa, off in zip(distinct, offsets)}
    table = np.concatenate(
        [d.table + offset_of[d] for d in distinct], axis=0
    ).reshape(-1, len(alphabet))
    accepting = np.concatenate([d.accepting for d in distinct])
    initial = frozenset(offset_of[dfa] + state for dfa, state in starts)

    def follow(states: frozenset[int], symbol: str) -> frozenset[int]:
        i = alphabet.index(symbol)
        return frozenset(int(table[q, i]) for q in states)

    dfa, _ = crawl(
        alphabet, initial, lambda s: bool(accepting[list(s)].any()), follow
    )
    return dfa
