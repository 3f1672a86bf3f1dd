"""Reading and writing proof tables.

```
proof regular channel alpha
V 0 00,01,02,04
V 1 10,11,12,14
default empty
Q 00,12,20,30 = EVA_a* . EV_a* | ODA_a* . EV_a*
```

```
proof recognizable
feedback 00,10 03,13
R 03,13 = (D_a . D_a, eps)
  + (eps, D_b . D_b)
```

`#` starts a comment and a line starting with whitespace continues the
previous one. `Q` lines take a regular expression over the designated
channel; `R` lines take a sum of tuples with one expression per channel.
`V <node> <states>` lines declare the per-node state sets of a partial
table. `feedback` declares a feedback vertex set: the listed composite
states, or the states with an `R` line if none are listed. Without
`default empty`, a full table needs an entry for every composite state.
"""

from typing import Optional, Union

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.errors import ParseError
from cfsm_verify.src.errors import ProofFormatError
from cfsm_verify.src.lang import regex
from cfsm_verify.src.lang.nfa import compile_regex
from cfsm_verify.src.lang.recrel import parse_relation
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.proofs.tables import RecognizableTable
from cfsm_verify.src.proofs.tables import RegularTable

Table = Union[RegularTable, RecognizableTable]


def _logical_lines(text: str) -> list[tuple[int, str]]:
    lines: list[tuple[int, str]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        if content[0].isspace():
            if not lines:
                raise ProofFormatError(
                    "A continuation line needs a line to continue",
                    line=number,
                )
            first, previous = lines[-1]
            lines[-1] = (first, f"{previous} {content.strip()}")
        else:
            lines.append((number, content.rstrip()))
    return lines


def _composite(
    protocol: Protocol, text: str, number: int
) -> types.CompositeState:
    composite = tuple(s.strip() for s in text.split(","))
    if len(composite) != len(protocol.nodes):
        raise ProofFormatError(
            f"Composite state {text!r} needs {len(protocol.nodes)} local "
            "states",
            line=number,
        )
    for node, state in zip(protocol.nodes, composite):
        if state not in protocol.machine(node).states:
            raise ProofFormatError(
                f"Node {node} has no state {state!r}", line=number
            )
    return composite


def _entry(
    protocol: Protocol, body: str, number: int
) -> tuple[types.CompositeState, str, int]:
    if "=" not in body:
        raise ProofFormatError(
            "Expected `<states> = <expression>`", line=number
        )
    left, right = body.split("=", 1)
    offset = len(body) - len(right)
    return _composite(protocol, left.strip(), number), right, offset


@cfsm_verify_export("cfsm_verify.proofs.parse_proof")
def parse_proof(text: str, protocol: Protocol) -> Table:
    """Parses a proof file against the protocol it is about.

    Raises:
        ProofFormatError: on a malformed line, with its line number.
    """
    lines = _logical_lines(text)
    if not lines:
        raise ProofFormatError("Missing `proof` line", line=1)
    number, header = lines[0]
    words = header.split()
    if words[:2] == ["proof", "recognizable"] and len(words) == 2:
        channel = None
    elif words[:3] == ["proof", "regular", "channel"] and len(words) == 4:
        channel = words[3]
        if channel not in protocol.channel_names:
            raise ProofFormatError(
                f"Unknown channel {channel!r}", line=number
            )
    else:
        raise ProofFormatError(
            "Expected `proof regular channel <channel>` or "
            "`proof recognizable`",
            line=number,
        )
    entries: dict = {}
    v_sets: dict[types.NodeId, frozenset[types.StateName]] = {}
    feedback: Optional[set[types.CompositeState]] = None
    default_empty = False
    entry_keyword = "R" if channel is None else "Q"
    for number, line in lines[1:]:
        keyword, _, body = line.partition(" ")
        if keyword == "default":
            if body.strip() != "empty":
                raise ProofFormatError("Expected `default empty`", line=number)
            default_empty = True
        elif keyword == "V":
            fields = body.split()
            if len(fields) != 2:
                raise ProofFormatError(
                    "Expected `V <node> <state>,...`", line=number
                )
            node, states = fields
            if node not in protocol.nodes:
                raise ProofFormatError(f"Unknown node {node!r}", line=number)
            if node in v_sets:
                raise ProofFormatError(
                    f"Duplicate state set for node {node}", line=number
                )
            known = protocol.machine(node).states
            chosen = frozenset(states.split(","))
            strange = sorted(chosen - set(known))
            if strange:
                raise ProofFormatError(
                    f"Node {node} has no states {strange}", line=number
                )
            v_sets[node] = chosen
        elif keyword == "feedback" and channel is None:
            feedback = feedback or set()
            for text_state in body.split():
                feedback.add(_composite(protocol, text_state, number))
        elif keyword == entry_keyword:
            composite, expression, offset = _entry(protocol, body, number)
            if composite in entries:
                raise ProofFormatError(
                    f"Duplicate entry for ({','.join(composite)})",
                    line=number,
                )
            try:
                if channel is None:
                    entries[composite] = parse_relation(
                        expression,
                        protocol.channel_names,
                        protocol.channel_alphabets,
                    )
                else:
                    alphabet = protocol.alphabet(channel)
                    entries[composite] = compile_regex(
                        regex.parse_regex(expression, alphabet), alphabet
                    ).minimize()
            except ParseError as e:
                position = len(keyword) + 1 + offset + (e.position or 0)
                raise ProofFormatError(
                    e.message, line=number, position=position
                ) from e
        else:
            raise ProofFormatError(
                f"Unknown keyword {keyword!r}", line=number
            )
    if feedback is not None and v_sets:
        raise ProofFormatError(
            "A table is indexed by `V` lines or by `feedback`, not both"
        )
    if feedback is not None and not feedback:
        feedback = set(entries)
    try:
        if channel is None:
            return RecognizableTable(
                protocol.channel_names,
                protocol.channel_alphabets,
                entries,
                v_sets=v_sets or None,
                feedback=feedback,
                default_empty=default_empty,
            )
        return RegularTable(
            channel,
            protocol.alphabet(channel),
            entries,
            v_sets=v_sets or None,
            default_empty=default_empty,
        )
    except ValueError as e:
        raise ProofFormatError(str(e)) from e


@cfsm_verify_export("cfsm_verify.proofs.load_proof")
def load_proof(path: str, protocol: Protocol) -> Table:
    with open(path, encoding="utf-8") as f:
        return parse_proof(f.read(), protocol)


@cfsm_verify_export("cfsm_verify.proofs.write_proof")
def write_proof(table: Table, protocol: Protocol) -> str:
    """Writes a table in the format `parse_proof` reads.

    With `default_empty`, empty entries are left out. Entries come in the
    order of `protocol.composite_states()`.
    """
    if isinstance(table, RegularTable):
        lines = [f"proof regular channel {table.channel}"]
    else:
        lines = ["proof recognizable"]
    for node, states in (table.v_sets or {}).items():
        ordered = [s for s in protocol.machine(node).states if s in states]
        lines.append(f"V {node} {','.join(ordered)}")
    feedback = getattr(table, "feedback", None)
    if feedback is not None:
        ordered = [s for s in protocol.composite_states() if s in feedback]
        lines.append("feedback " + " ".join(",".join(s) for s in ordered))
    if table.default_empty:
        lines.append("default empty")
    for composite in protocol.composite_states():
        entry = table.entries.get(composite)
        if entry is None or (table.default_empty and entry.is_empty()):
            continue
        if isinstance(table, RegularTable):
            body = regex.to_text(regex.to_regex(entry))
            lines.append(f"Q {','.join(composite)} = {body}")
        else:
            terms = [
                "("
                + ", ".join(regex.to_text(regex.to_regex(d)) for d in term)
                + ")"
                for term in entry.to_products()
            ] or ["empty"]
            lines.append(f"R {','.join(composite)} = {terms[0]}")
            lines.extend(f"  + {term}" for term in terms[1:])
    return "\n".join(lines) + "\n"
