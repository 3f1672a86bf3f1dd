"""Tag systems with deletion number 2, and their protocol simulation.

A tag system `(Σ, g, w0)` rewrites a word by dropping its first two symbols
and appending `g` of the first one. Words of length at most one rewrite to
the empty word, which is a fixpoint.

Tag file format:

```
tag
prod a b b
prod b a
start a a a
```

Symbols are whitespace separated; `eps` writes the empty word.
"""

import dataclasses
from typing import Mapping, Optional

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.errors import TagFormatError
from cfsm_verify.src.lang import regex
from cfsm_verify.src.model.protocol import Channel
from cfsm_verify.src.model.protocol import Machine
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.protocol import Transition
from cfsm_verify.src.model.protocol import receive
from cfsm_verify.src.model.protocol import send

HALTED = "halted"
CYCLED = "cycled"
EXHAUSTED = "exhausted"

# Channel and symbol naming of `tag_to_protocol`.
ALPHA = "alpha"
BETA = "beta"
DUMMY = "f"


@cfsm_verify_export("cfsm_verify.gen.TagSystem")
@dataclasses.dataclass(frozen=True)
class TagSystem:
    """A tag system with deletion number 2.

    Args:
        productions: The map `g`, one word per symbol. Its keys are the
            alphabet.
        start: The initial word `w0`.
    """

    productions: Mapping[types.Symbol, types.Word]
    start: types.Word

    def __post_init__(self) -> None:
        productions = {
            symbol: tuple(word)
            for symbol, word in sorted(self.productions.items())
        }
        object.__setattr__(self, "productions", productions)
        object.__setattr__(self, "start", tuple(self.start))
        used = set(self.start)
        for word in productions.values():
            used.update(word)
        missing = used - set(productions)
        if missing:
            raise ValueError(
                f"Symbols {sorted(missing)} are used but have no production"
            )

    @property
    def alphabet(self) -> tuple[types.Symbol, ...]:
        return tuple(self.productions)

    @property
    def min_production(self) -> int:
        return min((len(w) for w in self.productions.values()), default=0)

    @property
    def max_production(self) -> int:
        return max((len(w) for w in self.productions.values()), default=0)


@cfsm_verify_export("cfsm_verify.gen.TagRun")
@dataclasses.dataclass(frozen=True)
class TagRun:
    """The sequence `s_0, s_1, ...` of a tag system, as far as computed.

    Attributes:
        words: The computed words, starting with `w0`.
        status: `halted` if the empty word was reached, `cycled` if a word
            repeated (the last word equals an earlier one), `exhausted` if
            the step budget ran out first.
    """

    words: tuple[types.Word, ...]
    status: str

    @property
    def halts(self) -> Optional[bool]:
        if self.status == EXHAUSTED:
            return None
        return self.status == HALTED

    @property
    def max_length(self) -> int:
        return max(len(w) for w in self.words)


@cfsm_verify_export("cfsm_verify.gen.tag_step")
def tag_step(system: TagSystem, word: types.Word) -> types.Word:
    word = tuple(word)
    if len(word) <= 1:
        return ()
    return word[2:] + system.productions[word[0]]


@cfsm_verify_export("cfsm_verify.gen.tag_run")
def tag_run(system: TagSystem, max_steps: int = 10_000) -> TagRun:
    """Iterates `tag_step` until it halts, repeats a word or runs out.

    A repeated word means the sequence is periodic from there on, so the
    word lengths are bounded and the empty word is never reached.
    """
    if max_steps < 0:
        raise ValueError(
            f"`max_steps` must be nonnegative, received {max_steps}"
        )
    words = [system.start]
    seen = {system.start}
    for _ in range(max_steps):
        if not words[-1]:
            return TagRun(tuple(words), HALTED)
        following = tag_step(system, words[-1])
        words.append(following)
        if following in seen:
            return TagRun(tuple(words), CYCLED)
        seen.add(following)
    if not words[-1]:
        return TagRun(tuple(words), HALTED)
    return TagRun(tuple(words), EXHAUSTED)


@cfsm_verify_export("cfsm_verify.gen.tag_bounded")
def tag_bounded(system: TagSystem, max_steps: int = 10_000) -> Optional[bool]:
    """Whether the word lengths stay bounded; `None` when undetermined.

    Halting and cycling runs are bounded. An exhausted run is undetermined.
    """
    run = tag_run(system, max_steps)
    if run.status == EXHAUSTED:
        return None
    return True


def _word_text(word: types.Word) -> str:
    return " ".join(word) if word else "eps"


@cfsm_verify_export("cfsm_verify.gen.parse_tag_system")
def parse_tag_system(text: str) -> TagSystem:
    """Parses the tag file format.

    Raises:
        TagFormatError: on a malformed line, with its line number.
    """
    header = False
    productions: dict[types.Symbol, types.Word] = {}
    start: Optional[types.Word] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        words = raw.split("#", 1)[0].split()
        if not words:
            continue
        keyword, args = words[0], words[1:]
        body = tuple(args[1:]) if keyword == "prod" else tuple(args)
        if body == ("eps",):
            body = ()
        for symbol in body:
            if not regex.is_identifier(symbol):
                raise TagFormatError(f"Bad symbol {symbol!r}", line=number)
        if keyword == "tag":
            if args or header:
                raise TagFormatError("Expected a single `tag`", line=number)
            header = True
        elif keyword == "prod":
            if not args:
                raise TagFormatError(
                    "Expected `prod <sym> <word|eps>`", line=number
                )
            if args[0] in productions:
                raise TagFormatError(
                    f"Duplicate production for {args[0]!r}", line=number
                )
            productions[args[0]] = body
        elif keyword == "start":
            if start is not None:
                raise TagFormatError("Duplicate `start` line", line=number)
            start = body
        else:
            raise TagFormatError(f"Unknown keyword {keyword!r}", line=number)
    if not header:
        raise TagFormatError("Missing `tag` line", line=1)
    if start is None:
        raise TagFormatError("Missing `start` line")
    try:
        return TagSystem(productions, start)
    except ValueError as e:
        raise TagFormatError(str(e)) from e


@cfsm_verify_export("cfsm_verify.gen.format_tag_system")
def format_tag_system(system: TagSystem) -> str:
    lines = ["tag"]
    for symbol, word in system.productions.items():
        lines.append(f"prod {symbol} {_word_text(word)}")
    lines.append(f"start {_word_text(system.start)}")
    return "\n".join(lines) + "\n"


def alpha_symbol(symbol: types.Symbol) -> types.Symbol:
    return f"{symbol}_a"


def beta_symbol(symbol: types.Symbol) -> types.Symbol:
    return f"{symbol}_b"


@cfsm_verify_export("cfsm_verify.gen.tag_to_protocol")
def tag_to_protocol(system: TagSystem, name: str = "tag") -> Protocol:
    """Builds the pair of send/receive machines simulating `system`.

    Node `0` is a repeater: `h` receives `d_b` and sends `d_a` back. Node
    `1` first sends `w0` on `beta`, ending in `q`. From `q` it receives the
    first symbol `d_a` (to `q_d`), then any second symbol, then sends
    `g(d)` on `beta` and returns to `q`. The transition `q +f h1` is never
    executable; it only makes the diagram strongly connected.

    For `w != λ`, `w` occurs in the sequence of `system` iff
    `((h, q), (w_a, λ))` is reachable, and the sequence reaches `λ` iff a
    state `((h, q), (λ, λ))` or `((h, q_d), (λ, λ))` is reachable, which
    is a deadlock.
    """
    alphabet = system.alphabet
    repeater = []
    for d in alphabet:
        relay = f"p_{d}"
        repeater.append(Transition("h", receive(beta_symbol(d), BETA), relay))
        repeater.append(Transition(relay, send(alpha_symbol(d), ALPHA), "h"))

    simulator = []

    def chain(source: str, word: types.Word, prefix: str) -> None:
        state = source
        for i, symbol in enumerate(word):
            target = "q" if i == len(word) - 1 else f"{prefix}{i + 1}"
            simulator.append(
                Transition(state, send(beta_symbol(symbol), BETA), target)
            )
            state = target

    initial = "h1" if system.start else "q"
    chain(initial, system.start, "w")
    for d in alphabet:
        simulator.append(
            Transition("q", receive(alpha_symbol(d), ALPHA), f"q_{d}")
        )
        production = system.productions[d]
        after = f"c_{d}" if production else "q"
        for e in alphabet:
            simulator.append(
                Transition(f"q_{d}", receive(alpha_symbol(e), ALPHA), after)
            )
        chain(after, production, f"c_{d}_")
    simulator.append(Transition("q", receive(DUMMY, ALPHA), initial))

    return Protocol(
        name=name,
        nodes=("0", "1"),
        channels=(Channel(ALPHA, "0", "1"), Channel(BETA, "1", "0")),
        alphabets={
            ALPHA: [alpha_symbol(d) for d in alphabet] + [DUMMY],
            BETA: [beta_symbol(d) for d in alphabet],
        },
        machines=(
            Machine("0", "h", tuple(repeater)),
            Machine("1", initial, tuple(simulator)),
        ),
    )
