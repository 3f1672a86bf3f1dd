import dataclasses
from typing import Iterable, Optional

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.lang import regex
from cfsm_verify.src.lang.dfa import Dfa
from cfsm_verify.src.lang.dfa import crawl


@dataclasses.dataclass
class Nfa:
    """A nondeterministic automaton with λ-moves.

    Edges labelled `None` are λ-moves. There is one start and one final
    state, as produced by the Thompson construction.
    """

    num_states: int = 0
    edges: list[list[tuple[Optional[types.Symbol], int]]] = dataclasses.field(
        default_factory=list
    )
    start: int = 0
    final: int = 0

    def add_state(self) -> int:
        self.edges.append([])
        self.num_states += 1
        return self.num_states - 1

    def add_edge(
        self, source: int, label: Optional[types.Symbol], target: int
    ) -> None:
        self.edges[source].append((label, target))

    def closure(self, states: Iterable[int]) -> frozenset[int]:
        """The λ-closure of `states`."""
        result = set(states)
        stack = list(result)
        while stack:
            state = stack.pop()
            for label, target in self.edges[state]:
                if label is None and target not in result:
                    result.add(target)
                    stack.append(target)
        return frozenset(result)

    def move(self, states: Iterable[int], symbol: types.Symbol) -> set[int]:
        return {
            target
            for state in states
            for label, target in self.edges[state]
            if label == symbol
        }

    def determinize(self, alphabet: Iterable[types.Symbol]) -> Dfa:
        """Subset construction; the empty subset becomes the sink."""
        alphabet = tuple(sorted(set(alphabet)))
        dfa, _ = crawl(
            alphabet,
            self.closure([self.start]),
            lambda subset: self.final in subset,
            lambda subset, symbol: self.closure(self.move(subset, symbol)),
        )
        return dfa


def _thompson(nfa: Nfa, node: regex.Regex) -> tuple[int, int]:
    start = nfa.add_state()
    final = nfa.add_state()
    if isinstance(node, regex.Epsilon):
        nfa.add_edge(start, None, final)
    elif isinstance(node, regex.Sym):
        nfa.add_edge(start, node.symbol, final)
    elif isinstance(node, regex.Alt):
        for option in node.options:
            inner_start, inner_final = _thompson(nfa, option)
            nfa.add_edge(start, None, inner_start)
            nfa.add_edge(inner_final, None, final)
    elif isinstance(node, regex.Concat):
        current = start
        for part in node.parts:
            inner_start, inner_final = _thompson(nfa, part)
            nfa.add_edge(current, None, inner_start)
            current = inner_final
        nfa.add_edge(current, None, final)
    elif isinstance(node, regex.Star):
        inner_start, inner_final = _thompson(nfa, node.inner)
        nfa.add_edge(start, None, inner_start)
        nfa.add_edge(inner_final, None, inner_start)
        nfa.add_edge(start, None, final)
        nfa.add_edge(inner_final, None, final)
    # `EmptySet` leaves `start` and `final` disconnected.
    return start, final


def to_nfa(node: regex.Regex) -> Nfa:
    """Thompson construction."""
    nfa = Nfa()
    nfa.start, nfa.final = _thompson(nfa, node)
    return nfa


@cfsm_verify_export("cfsm_verify.lang.compile_regex")
def compile_regex(
    node: regex.Regex, alphabet: Optional[Iterable[types.Symbol]] = None
) -> Dfa:
    """Compiles a regular expression into its minimal complete Dfa.

    Args:
        node: The expression.
        alphabet: The alphabet of the result. Defaults to the symbols that
            occur in `node`; must include them.

    Returns:
        The minimal complete Dfa.
    """
    used = regex.symbols(node)
    alphabet = used if alphabet is None else frozenset(alphabet)
    if not used <= alphabet:
        raise ValueError(
            f"Symbols {sorted(used - alphabet)} of the expression are not in "
            f"`alphabet` {sorted(alphabet)}"
        )
    return to_nfa(node).determinize(alphabet).minimize()


@cfsm_verify_export("cfsm_verify.lang.parse_language")
def parse_language(text: str, alphabet: Iterable[types.Symbol]) -> Dfa:
    """Parses and compiles an expression over `alphabet` in one step."""
    alphabet = frozenset(alphabet)
    return compile_regex(regex.parse_regex(text, alphabet), alphabet)
