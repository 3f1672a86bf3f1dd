"""Reading and writing the line-oriented protocol file format.

```
# One direction of a credit-based flow control protocol.
protocol flowctl2
node 0
node 1
channel alpha from 0 to 1
alphabet alpha D_a R_a A_a
machine 0 start 00
trans 0 00 -D_a@alpha 03
```

`#` starts a comment. `state <node> <state> ...` declares states that have
no transitions.
"""

import collections
import re
from typing import Callable, Optional

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.errors import ProtocolFormatError
from cfsm_verify.src.model.protocol import Action
from cfsm_verify.src.model.protocol import Channel
from cfsm_verify.src.model.protocol import Machine
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.protocol import Transition

_WORD = re.compile(r"\S+")


class _Line:
    def __init__(self, number: int, text: str) -> None:
        self.number = number
        self.matches = list(_WORD.finditer(text))
        self.words = [m.group() for m in self.matches]

    def error(self, message: str, index: int = 0) -> ProtocolFormatError:
        position = self.matches[index].start() if self.matches else 0
        return ProtocolFormatError(
            message, line=self.number, position=position
        )

    def expect(self, count: int, usage: str) -> None:
        if len(self.words) != count:
            raise self.error(
                f"Expected `{usage}`, got {len(self.words)} fields",
                min(len(self.words), count) - 1,
            )


@cfsm_verify_export("cfsm_verify.model.parse_protocol")
def parse_protocol(text: str) -> Protocol:
    """Parses a protocol file.

    Only the syntax is checked here; use `validate` for the model
    conditions.

    Args:
        text: The file contents.

    Returns:
        The protocol.

    Raises:
        ProtocolFormatError: on a malformed line, with its line number.
    """
    name: Optional[str] = None
    nodes: list[types.NodeId] = []
    channels: list[Channel] = []
    alphabets: dict[types.ChannelId, list[types.Symbol]] = {}
    starts: dict[types.NodeId, types.StateName] = {}
    extra_states: dict[types.NodeId, list[types.StateName]] = (
        collections.defaultdict(list)
    )
    transitions: dict[types.NodeId, list[Transition]] = (
        collections.defaultdict(list)
    )
    first_use: dict[types.NodeId, _Line] = {}

    for number, raw in enumerate(text.splitlines(), start=1):
        line = _Line(number, raw.split("#", 1)[0])
        if not line.words:
            continue
        keyword = line.words[0]
        if keyword == "protocol":
            line.expect(2, "protocol <name>")
            if name is not None:
                raise line.error("Duplicate `protocol` line")
            name = line.words[1]
        elif keyword == "node":
            line.expect(2, "node <id>")
            nodes.append(line.words[1])
        elif keyword == "channel":
            line.expect(6, "channel <id> from <node> to <node>")
            if line.words[2] != "from":
                raise line.error("Expected `from`", 2)
            if line.words[4] != "to":
                raise line.error("Expected `to`", 4)
            channels.append(
                Channel(line.words[1], line.words[3], line.words[5])
            )
        elif keyword == "alphabet":
            if len(line.words) < 3:
                raise line.error(
                    "Expected `alphabet <channel> <sym> ...`",
                    len(line.words) - 1,
                )
            alphabets.setdefault(line.words[1], []).extend(line.words[2:])
        elif keyword == "machine":
            line.expect(4, "machine <node> start <state>")
            if line.words[2] != "start":
                raise line.error("Expected `start`", 2)
            node = line.words[1]
            if node in starts:
                raise line.error(f"Duplicate machine for node {node}", 1)
            starts[node] = line.words[3]
        elif keyword == "state":
            if len(line.words) < 3:
                raise line.error(
                    "Expected `state <node> <state> ...`", len(line.words) - 1
                )
            extra_states[line.words[1]].extend(line.words[2:])
            first_use.setdefault(line.words[1], line)
        elif keyword == "trans":
            line.expect(5, "trans <node> <state> <action> <state>")
            try:
                action = Action.parse(line.words[3])
            except ValueError as e:
                raise line.error(str(e), 3) from e
            transitions[line.words[1]].append(
                Transition(line.words[2], action, line.words[4])
            )
            first_use.setdefault(line.words[1], line)
        else:
            raise line.error(f"Unknown keyword {keyword!r}")

    if name is None:
        raise ProtocolFormatError("Missing `protocol <name>` line", line=1)
    for node, line in first_use.items():
        if node not in starts:
            raise line.error(
                f"Node {node} has transitions but no `machine` line", 1
            )
    machines = [
        Machine(
            node,
            starts[node],
            tuple(transitions[node]),
            tuple(extra_states[node]),
        )
        for node in sorted(starts, key=_declaration_order(nodes))
    ]
    return Protocol(
        name=name,
        nodes=tuple(nodes),
        channels=tuple(channels),
        alphabets=alphabets,
        machines=tuple(machines),
    )


def _declaration_order(
    nodes: list[types.NodeId],
) -> Callable[[types.NodeId], tuple[int, str]]:
    order = {node: i for i, node in enumerate(nodes)}
    return lambda node: (order.get(node, len(order)), node)


@cfsm_verify_export("cfsm_verify.model.format_protocol")
def format_protocol(protocol: Protocol) -> str:
    """Writes a protocol in the format `parse_protocol` reads."""
    lines = [f"protocol {protocol.name}"]
    lines.extend(f"node {node}" for node in protocol.nodes)
    for c in protocol.channels:
        lines.append(f"channel {c.name} from {c.tail} to {c.head}")
    for c in protocol.channels:
        symbols = protocol.alphabet(c.name)
        if symbols:
            lines.append(f"alphabet {c.name} {' '.join(symbols)}")
    for machine in protocol.machines:
        lines.append(f"machine {machine.node} start {machine.initial}")
        mentioned = {machine.initial}
        for t in machine.transitions:
            mentioned.update((t.source, t.target))
        isolated = [s for s in machine.states if s not in mentioned]
        if isolated:
            lines.append(f"state {machine.node} {' '.join(isolated)}")
        for t in machine.transitions:
            lines.append(f"trans {machine.node} {t}")
    return "\n".join(lines) + "\n"


@cfsm_verify_export("cfsm_verify.model.load_protocol")
def load_protocol(path: str) -> Protocol:
    with open(path, encoding="utf-8") as f:
        return parse_protocol(f.read())
