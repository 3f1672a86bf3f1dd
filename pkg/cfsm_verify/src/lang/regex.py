"""Regular expressions over channel alphabets.

Concrete syntax:

```
union   := concat ('|' concat)*
concat  := starred ('.' starred)*
starred := atom '*'*
atom    := 'eps' | 'empty' | IDENT | '(' union ')'
```

Identifiers are maximal runs of characters other than whitespace and
`( ) . | * , + @`. Concatenation is always written with `.`; juxtaposition
is a syntax error.
"""

import dataclasses
import re
from typing import Iterable, Optional, Union

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.errors import RegexSyntaxError
from cfsm_verify.src.lang.dfa import Dfa

RESERVED = frozenset({"eps", "empty"})
SPECIAL_CHARACTERS = "().|*,+@"

_TOKEN = re.compile(r"\s*(?:([().|*])|([^\s().|*,+@]+)|(\S))")


@cfsm_verify_export("cfsm_verify.lang.EmptySet")
@dataclasses.dataclass(frozen=True)
class EmptySet:
    pass


@cfsm_verify_export("cfsm_verify.lang.Epsilon")
@dataclasses.dataclass(frozen=True)
class Epsilon:
    pass


@cfsm_verify_export("cfsm_verify.lang.Sym")
@dataclasses.dataclass(frozen=True)
class Sym:
    symbol: types.Symbol


@cfsm_verify_export("cfsm_verify.lang.Alt")
@dataclasses.dataclass(frozen=True)
class Alt:
    options: tuple["Regex", ...]


@cfsm_verify_export("cfsm_verify.lang.Concat")
@dataclasses.dataclass(frozen=True)
class Concat:
    parts: tuple["Regex", ...]


@cfsm_verify_export("cfsm_verify.lang.Star")
@dataclasses.dataclass(frozen=True)
class Star:
    inner: "Regex"


Regex = Union[EmptySet, Epsilon, Sym, Alt, Concat, Star]


def is_identifier(name: str) -> bool:
    """Whether `name` can be written as a symbol in expressions."""
    return (
        bool(name)
        and name not in RESERVED
        and not any(c.isspace() or c in SPECIAL_CHARACTERS for c in name)
    )


class _Parser:
    def __init__(self, text: str, alphabet: frozenset[str]) -> None:
        self.text = text
        self.alphabet = alphabet
        self.tokens: list[tuple[str, int]] = []
        position = 0
        while True:
            match = _TOKEN.match(text, position)
            if match is None:
                break
            if match.group(3) is not None:
                raise RegexSyntaxError(
                    f"Unexpected character {match.group(3)!r}",
                    position=match.start(3),
                )
            token = match.group(1) or match.group(2)
            start = match.start(1) if match.group(1) else match.start(2)
            self.tokens.append((token, start))
            position = match.end()
        if text[position:].strip():
            raise RegexSyntaxError("Trailing garbage", position=position)
        self.index = 0

    def peek(self) -> Optional[str]:
        if self.index < len(self.tokens):
            return self.tokens[self.index][0]
        return None

    def position(self) -> int:
        if self.index < len(self.tokens):
            return self.tokens[self.index][1]
        return len(self.text)

    def take(self) -> str:
        token = self.tokens[self.index][0]
        self.index += 1
        return token

    def parse(self) -> Regex:
        if not self.tokens:
            raise RegexSyntaxError("Empty expression", position=0)
        result = self.union()
        if self.peek() is not None:
            raise RegexSyntaxError(
                f"Unexpected {self.peek()!r}; concatenation must be "
                "written with '.'",
                position=self.position(),
            )
        return result

    def union(self) -> Regex:
        options = [self.concat()]
        while self.peek() == "|":
            self.take()
            options.append(self.concat())
        return options[0] if len(options) == 1 else Alt(tuple(options))

    def concat(self) -> Regex:
        parts = [self.starred()]
        while self.peek() == ".":
            self.take()
            parts.append(self.starred())
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def starred(self) -> Regex:
        result = self.atom()
        while self.peek() == "*":
            self.take()
            result = Star(result)
        return result

    def atom(self) -> Regex:
        token = self.peek()
        position = self.position()
        if token is None:
            raise RegexSyntaxError("Unexpected end of input", position=position)
        if token == "(":
            self.take()
            result = self.union()
            if self.peek() != ")":
                raise RegexSyntaxError(
                    "Expected ')'", position=self.position()
                )
            self.take()
            return result
        if token in ").|*":
            raise RegexSyntaxError(f"Unexpected {token!r}", position=position)
        self.take()
        if token == "eps":
            return Epsilon()
        if token == "empty":
            return EmptySet()
        if token not in self.alphabet:
            raise RegexSyntaxError(
                f"Symbol {token!r} is not in the alphabet "
                f"{sorted(self.alphabet)}",
                position=position,
            )
        return Sym(token)


@cfsm_verify_export("cfsm_verify.lang.parse_regex")
def parse_regex(text: str, alphabet: Iterable[types.Symbol]) -> Regex:
    """Parses a regular expression.

    Precedence is `*` over `.` over `|`. The tree mirrors the text:
    `to_text(parse_regex(t, a))` parses back to the same tree.

    Args:
        text: The expression.
        alphabet: The symbols allowed as leaves.

    Returns:
        The parse tree.

    Example:

    ```python
    parse_regex("a | b . b", {"a", "b"})
    # Alt((Sym("a"), Concat((Sym("b"), Sym("b")))))
    ```
    """
    return _Parser(text, frozenset(alphabet)).parse()


def _wrap(node: Regex, parenthesize: bool) -> str:
    text = to_text(node)
    return f"({text})" if parenthesize else text


@cfsm_verify_export("cfsm_verify.lang.to_text")
def to_text(node: Regex) -> str:
    """Prints a regular expression in the syntax `parse_regex` reads."""
    if isinstance(node, EmptySet):
        return "empty"
    if isinstance(node, Epsilon):
        return "eps"
    if isinstance(node, Sym):
        return node.symbol
    if isinstance(node, Alt):
        return " | ".join(
            _wrap(option, isinstance(option, Alt)) for option in node.options
        )
    if isinstance(node, Concat):
        return " . ".join(
            _wrap(part, isinstance(part, (Alt, Concat))) for part in node.parts
        )
    if isinstance(node, Star):
        return _wrap(node.inner, isinstance(node.inner, (Alt, Concat))) + "*"
    raise TypeError(f"Not a regular expression: {node!r}")


def symbols(node: Regex) -> frozenset[types.Symbol]:
    """The symbols occurring in `node`."""
    if isinstance(node, Sym):
        return frozenset({node.symbol})
    if isinstance(node, Alt):
        return frozenset().union(*(symbols(o) for o in node.options))
    if isinstance(node, Concat):
        return frozenset().union(*(symbols(p) for p in node.parts))
    if isinstance(node, Star):
        return symbols(node.inner)
    return frozenset()


# Simplifying constructors, used when expressions are computed rather than
# parsed.


def alt(*options: Regex) -> Regex:
    flat: list[Regex] = []
    for option in options:
        for item in option.options if isinstance(option, Alt) else (option,):
            if not isinstance(item, EmptySet) and item not in flat:
                flat.append(item)
    if not flat:
        return EmptySet()
    if len(flat) == 1:
        return flat[0]
    # `eps | x*` is `x*`.
    if Epsilon() in flat and any(isinstance(f, Star) for f in flat):
        flat.remove(Epsilon())
        if len(flat) == 1:
            return flat[0]
    return Alt(tuple(flat))


def concat(*parts: Regex) -> Regex:
    flat: list[Regex] = []
    for part in parts:
        for item in part.parts if isinstance(part, Concat) else (part,):
            if isinstance(item, EmptySet):
                return EmptySet()
            if not isinstance(item, Epsilon):
                flat.append(item)
    if not flat:
        return Epsilon()
    if len(flat) == 1:
        return flat[0]
    return Concat(tuple(flat))


def star(inner: Regex) -> Regex:
    if isinstance(inner, (EmptySet, Epsilon)):
        return Epsilon()
    if isinstance(inner, Star):
        return inner
    return Star(inner)


@cfsm_verify_export("cfsm_verify.lang.to_regex")
def to_regex(dfa: Dfa) -> Regex:
    """A regular expression for the language of `dfa`.

    Uses state elimination on the minimal automaton with its sink removed.
    """
    dfa = dfa.minimize()
    n = dfa.num_states
    live = [
        q for q in range(n) if not dfa.with_start(q).is_empty()
    ]
    if dfa.start not in live:
        return EmptySet()
    start, final = n, n + 1
    edges: dict[tuple[int, int], Regex] = {}

    def add(i: int, j: int, r: Regex) -> None:
        edges[(i, j)] = alt(edges.get((i, j), EmptySet()), r)

    add(start, dfa.start, Epsilon())
    for q in live:
        if dfa.accepting[q]:
            add(q, final, Epsilon())
        for i, symbol in enumerate(dfa.alphabet):
            target = int(dfa.table[q, i])
            if target in live:
                add(q, target, Sym(symbol))
    for q in live:
        loop = star(edges.pop((q, q), EmptySet()))
        incoming = [(i, r) for (i, j), r in edges.items() if j == q]
        outgoing = [(j, r) for (i, j), r in edges.items() if i == q]
        for i, _ in incoming:
            del edges[(i, q)]
        for j, _ in outgoing:
            del edges[(q, j)]
        for i, r_in in incoming:
            for j, r_out in outgoing:
                add(i, j, concat(r_in, loop, r_out))
    return edges.get((start, final), EmptySet())
