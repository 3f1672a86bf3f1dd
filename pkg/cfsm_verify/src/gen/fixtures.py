"""Built-in example protocols and the proof tables that go with them.

Several machines below are reconstructions: only their behaviour is
documented, not every transition. Each reconstruction is checked against
the documented consequences (state space size, stable states, table
entries) by the tests of the modules that use it.
"""

import dataclasses
from typing import Callable, Optional, Sequence

from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.gen import tags
from cfsm_verify.src.model.protocol import Action
from cfsm_verify.src.model.protocol import Channel
from cfsm_verify.src.model.protocol import Machine
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.protocol import Transition
from cfsm_verify.src.model.protocol_file import parse_protocol


@cfsm_verify_export("cfsm_verify.gen.Fixture")
@dataclasses.dataclass(frozen=True)
class Fixture:
    """A named example protocol.

    Attributes:
        name: The registry name.
        description: One line about what the protocol does.
        protocol: The protocol.
        proof: A proof table in the proof file format, if one comes with
            the protocol.
        reconstructed: Whether some transitions are reconstructions.
    """

    name: str
    description: str
    protocol: Protocol
    proof: Optional[str] = None
    reconstructed: bool = False


ACCESS = """\
# A client asks a server for access; the server grants or refuses it.
# The client may release and ask again before the server reads the
# release, so `alpha` holds up to two messages and the channel bound is 2,
# not 1. No transition forces the client to wait for the server.
protocol access
node 0
node 1
channel alpha from 0 to 1
channel beta from 1 to 0
alphabet alpha ACCESS_REQUEST RELINQUISHED_ACCESS
alphabet beta GRANTED_ACCESS REFUSED_ACCESS
machine 0 start 00
trans 0 00 -ACCESS_REQUEST@alpha 01
trans 0 01 +GRANTED_ACCESS@beta 02
trans 0 01 +REFUSED_ACCESS@beta 00
trans 0 02 -RELINQUISHED_ACCESS@alpha 00
machine 1 start 10
trans 1 10 +ACCESS_REQUEST@alpha 11
trans 1 11 -GRANTED_ACCESS@beta 12
trans 1 11 -REFUSED_ACCESS@beta 10
trans 1 12 +RELINQUISHED_ACCESS@alpha 10
"""

FLOWCTL2 = """\
# Two symmetric stations exchanging data (D), retransmissions (R) and
# acknowledgements (A); at most two messages are ever in transit.
protocol flowctl2
node 0
node 1
channel alpha from 0 to 1
channel beta from 1 to 0
alphabet alpha D_a R_a A_a
alphabet beta D_b R_b A_b
machine 0 start 00
trans 0 00 -D_a@alpha 03
trans 0 00 -R_a@alpha 03
trans 0 00 +D_b@beta 01
trans 0 00 +R_b@beta 02
trans 0 01 -A_a@alpha 00
trans 0 02 -D_a@alpha 00
trans 0 02 -R_a@alpha 00
trans 0 03 +D_b@beta 04
trans 0 03 +R_b@beta 00
trans 0 03 +A_b@beta 00
trans 0 04 -A_a@alpha 03
machine 1 start 10
trans 1 10 -D_b@beta 13
trans 1 10 -R_b@beta 13
trans 1 10 +D_a@alpha 11
trans 1 10 +R_a@alpha 12
trans 1 11 -A_b@beta 10
trans 1 12 -D_b@beta 10
trans 1 12 -R_b@beta 10
trans 1 13 +D_a@alpha 14
trans 1 13 +R_a@alpha 10
trans 1 13 +A_a@alpha 10
trans 1 14 -A_b@beta 13
"""

# The reachable channel contents of every composite state; entries not
# listed are empty.
FLOWCTL2_PROOF = """\
proof recognizable
default empty
R 00,10 = (eps, eps)
R 00,14 = (eps, eps)
R 04,10 = (eps, eps)
R 04,14 = (eps, eps)
R 01,13 = (eps, eps)
R 02,13 = (eps, eps)
R 03,11 = (eps, eps)
R 03,12 = (eps, eps)
R 00,13 = (D_a | R_a | A_a, eps) + (eps, D_b | R_b | A_b)
R 04,13 = (D_a | R_a | A_a, eps) + (eps, D_b | R_b | A_b)
R 03,10 = (D_a | R_a | A_a, eps) + (eps, D_b | R_b | A_b)
R 03,14 = (D_a | R_a | A_a, eps) + (eps, D_b | R_b | A_b)
R 03,13 = ((D_a | R_a | A_a) . (D_a | R_a | A_a), eps)
  + (D_a | R_a | A_a, D_b | R_b | A_b)
  + (eps, (D_b | R_b | A_b) . (D_b | R_b | A_b))
"""

COUNTER = """\
# Node 0 alternates two sends on two parallel channels; node 1 consumes
# them in the same order. The first channel can run ahead without bound.
protocol counter
node 0
node 1
channel first from 0 to 1
channel second from 0 to 1
alphabet first d
alphabet second b
machine 0 start 00
trans 0 00 -d@first 01
trans 0 01 -b@second 00
machine 1 start 10
trans 1 10 +d@first 11
trans 1 11 +b@second 10
"""

CHAIN_DEMO = """\
# Node 2 polls node 1, whose request fans out through nodes 3 and 4 and
# returns to node 2 on two channels in either order.
protocol chain-demo
node 1
node 2
node 3
node 4
channel alpha from 4 to 2
channel beta from 3 to 2
channel gamma from 2 to 1
channel delta from 1 to 3
channel epsilon from 1 to 4
alphabet alpha a
alphabet beta b
alphabet gamma go
alphabet delta x
alphabet epsilon y
machine 1 start 10
trans 1 10 +go@gamma 11
trans 1 11 -x@delta 12
trans 1 12 -y@epsilon 10
machine 2 start 20
trans 2 20 -go@gamma 21
trans 2 21 +a@alpha 22
trans 2 22 +b@beta 20
trans 2 21 +b@beta 23
trans 2 23 +a@alpha 20
machine 3 start 30
trans 3 30 +x@delta 31
trans 3 31 -b@beta 30
machine 4 start 40
trans 4 40 +y@epsilon 41
trans 4 41 -a@alpha 40
"""

# Alternating-bit style ring: node 0 sends data to node 1 through the
# transmission demon 2, node 1 acknowledges through demon 3. Demons relay
# or lose messages.
RING_CHANNELS = (
    Channel("alpha", "0", "2"),
    Channel("beta", "2", "1"),
    Channel("gamma", "1", "3"),
    Channel("delta", "3", "0"),
)
RING_SUFFIXES = {"alpha": "_a", "beta": "_b", "gamma": "_g", "delta": "_d"}
DATA = ("EV", "OD", "ED")
ACKS = ("EVA", "ODA", "EDA")

# (source, sign, message, target) of the sender in the demon ring.
_DEMONS_SENDER = (
    ("00", "-", "EV", "00"),
    ("00", "+", "EVA", "01"),
    ("00", "+", "EVA", "02"),
    ("00", "+", "ODA", "00"),
    ("00", "+", "EDA", "00"),
    ("01", "-", "OD", "01"),
    ("01", "+", "ODA", "00"),
    ("01", "+", "ODA", "02"),
    ("01", "+", "EVA", "01"),
    ("02", "-", "ED", "02"),
    ("02", "+", "EDA", "03"),
    ("02", "+", "EVA", "02"),
    ("02", "+", "ODA", "02"),
    ("03", "-", "EV", "00"),
)

# The turn-taking process of the second ring, as (source, sign, message,
# target) over local state numbers. Both ends run it.
_TURNS_PROCESS = (
    (0, "-", "EV", 0),
    (0, "+", "EVA", 1),
    (0, "+", "EVA", 2),
    (0, "+", "ODA", 0),
    (0, "+", "ED", 0),
    (1, "-", "OD", 1),
    (1, "+", "EVA", 1),
    (1, "+", "ODA", 0),
    (1, "+", "ODA", 2),
    (2, "-", "ED", 2),
    (2, "+", "EVA", 2),
    (2, "+", "ODA", 2),
    (2, "+", "EV", 3),
    (3, "-", "EVA", 4),
    (4, "+", "EV", 3),
    (4, "+", "OD", 5),
    (4, "+", "ED", 0),
    (5, "-", "ODA", 4),
)


def _on(message: str, channel: str) -> str:
    return message + RING_SUFFIXES[channel]


def _action(sign: str, message: str, channel: str) -> Action:
    return Action(sign, _on(message, channel), channel)


def _relay_demon(
    node: str, source: str, target: str, messages: Sequence[str]
) -> Machine:
    """Relays every message from `source` to `target` or loses it."""
    home = f"{node}0"
    transitions = []
    for i, message in enumerate(messages, start=1):
        holding = f"{node}{i}"
        transitions.append(
            Transition(home, _action("+", message, source), holding)
        )
        transitions.append(
            Transition(holding, _action("-", message, target), home)
        )
        transitions.append(
            Transition(home, _action("+", message, source), home)
        )
    return Machine(node, home, tuple(transitions))


def _ring(
    name: str, alphabets: dict[str, Sequence[str]], machines: list[Machine]
) -> Protocol:
    return Protocol(
        name=name,
        nodes=("0", "1", "2", "3"),
        channels=RING_CHANNELS,
        alphabets={
            channel: [_on(m, channel) for m in messages]
            for channel, messages in alphabets.items()
        },
        machines=tuple(sorted(machines, key=lambda m: m.node)),
    )


def _altbit_demons() -> Protocol:
    sender = Machine(
        "0",
        "00",
        tuple(
            Transition(
                source,
                _action(sign, message, "alpha" if sign == "-" else "delta"),
                target,
            )
            for source, sign, message, target in _DEMONS_SENDER
        ),
    )
    receiver = []
    for i, message in enumerate(DATA, start=1):
        receiver.append(
            Transition("10", _action("+", message, "beta"), f"1{i}")
        )
        receiver.append(
            Transition(f"1{i}", _action("-", message + "A", "gamma"), "10")
        )
    return _ring(
        "altbit-demons",
        {"alpha": DATA, "beta": DATA, "gamma": ACKS, "delta": ACKS},
        [
            sender,
            Machine("1", "10", tuple(receiver)),
            _relay_demon("2", "alpha", "beta", DATA),
            _relay_demon("3", "gamma", "delta", ACKS),
        ],
    )


def _turns_process(node: str, out: str, into: str, start: int) -> Machine:
    transitions = tuple(
        Transition(
            f"{node}{source}",
            _action(sign, message, out if sign == "-" else into),
            f"{node}{target}",
        )
        for source, sign, message, target in _TURNS_PROCESS
    )
    return Machine(node, f"{node}{start}", transitions)


def _altbit_turns() -> Protocol:
    everything = DATA + ACKS
    return _ring(
        "altbit-turns",
        {channel.name: everything for channel in RING_CHANNELS},
        [
            _turns_process("0", "alpha", "delta", 0),
            _turns_process("1", "gamma", "beta", 4),
            _relay_demon("2", "alpha", "beta", everything),
            _relay_demon("3", "gamma", "delta", everything),
        ],
    )


# Declared contents of all four channels while the receiver and both
# demons are at home; the other 252 entries follow by extension.
ALTBIT_DEMONS_PROOF = """\
proof recognizable
V 0 00,01,02,03
V 1 10
V 2 20
V 3 30
R 00,10,20,30 = (ED_a* . EV_a*, ED_b*, EDA_g*, EDA_d*)
  + (EV_a*, ED_b* . EV_b*, EDA_g*, EDA_d*)
  + (EV_a*, EV_b*, EDA_g* . EVA_g*, EDA_d*)
  + (EV_a*, EV_b*, EVA_g*, EDA_d* . EVA_d*)
  + (OD_a* . EV_a*, OD_b*, ODA_g*, ODA_d*)
  + (EV_a*, OD_b* . EV_b*, ODA_g*, ODA_d*)
  + (EV_a*, EV_b*, ODA_g* . EVA_g*, ODA_d*)
  + (EV_a*, EV_b*, EVA_g*, ODA_d* . EVA_d*)
R 01,10,20,30 = (EV_a* . OD_a*, EV_b*, EVA_g*, EVA_d*)
  + (OD_a*, EV_b* . OD_b*, EVA_g*, EVA_d*)
  + (OD_a*, OD_b*, EVA_g* . ODA_g*, EVA_d*)
  + (OD_a*, OD_b*, ODA_g*, EVA_d* . ODA_d*)
R 02,10,20,30 = (EV_a* . ED_a*, EV_b*, EVA_g*, EVA_d*)
  + (ED_a*, EV_b* . ED_b*, EVA_g*, EVA_d*)
  + (ED_a*, ED_b*, EVA_g* . EDA_g*, EVA_d*)
  + (ED_a*, ED_b*, EDA_g*, EVA_d* . EDA_d*)
  + (OD_a* . ED_a*, OD_b*, ODA_g*, ODA_d*)
  + (ED_a*, OD_b* . ED_b*, ODA_g*, ODA_d*)
  + (ED_a*, ED_b*, ODA_g* . EDA_g*, ODA_d*)
  + (ED_a*, ED_b*, EDA_g*, ODA_d* . EDA_d*)
R 03,10,20,30 = (ED_a*, ED_b*, EDA_g*, EDA_d*)
"""

# Contents of `alpha` while the other channels are empty, declared with
# both demons at home.
ALTBIT_TURNS_PROOF = """\
proof regular channel alpha
V 0 00,01,02,04
V 1 10,11,12,14
V 2 20
V 3 30
default empty
Q 00,12,20,30 = EVA_a* . EV_a* | ODA_a* . EV_a*
Q 00,14,20,30 = OD_a* . EV_a*
Q 01,14,20,30 = EV_a* . OD_a*
Q 02,10,20,30 = ED_a*
Q 02,14,20,30 = EV_a* . ED_a* | OD_a* . ED_a*
Q 04,10,20,30 = ED_a* . EVA_a* | ODA_a* . EVA_a*
Q 04,11,20,30 = EVA_a* . ODA_a*
Q 04,12,20,30 = EVA_a* | ODA_a*
"""

TAG_DEMO_SYSTEM = tags.TagSystem(
    {"a": ("b", "b"), "b": ("a",)}, ("a", "a", "a")
)


def _tag_demo() -> Protocol:
    return tags.tag_to_protocol(TAG_DEMO_SYSTEM, name="tag-demo")


_REGISTRY: dict[str, Callable[[], Fixture]] = {
    "access": lambda: Fixture(
        "access",
        "Access request, grant or refusal, and release; channel bound 2.",
        parse_protocol(ACCESS),
        reconstructed=True,
    ),
    "flowctl2": lambda: Fixture(
        "flowctl2",
        "Symmetric two-station flow control, at most two messages in "
        "transit.",
        parse_protocol(FLOWCTL2),
        proof=FLOWCTL2_PROOF,
    ),
    "counter": lambda: Fixture(
        "counter",
        "Two parallel channels filled in lockstep; not recognizable.",
        parse_protocol(COUNTER),
    ),
    "altbit-demons": lambda: Fixture(
        "altbit-demons",
        "Alternating-bit ring with lossy transmission demons.",
        _altbit_demons(),
        proof=ALTBIT_DEMONS_PROOF,
        reconstructed=True,
    ),
    "altbit-turns": lambda: Fixture(
        "altbit-turns",
        "Turn-taking alternating-bit ring with lossy demons.",
        _altbit_turns(),
        proof=ALTBIT_TURNS_PROOF,
        reconstructed=True,
    ),
    "chain-demo": lambda: Fixture(
        "chain-demo",
        "Four nodes where node 2 waits on two channels in either order.",
        parse_protocol(CHAIN_DEMO),
    ),
    "tag-demo": lambda: Fixture(
        "tag-demo",
        "Simulation of the tag system a -> bb, b -> a from aaa.",
        _tag_demo(),
    ),
}


@cfsm_verify_export("cfsm_verify.gen.fixture_names")
def fixture_names() -> list[str]:
    return sorted(_REGISTRY)


@cfsm_verify_export("cfsm_verify.gen.fixture")
def fixture(name: str) -> Fixture:
    """Returns a built-in fixture by name.

    Raises:
        ValueError: if `name` is unknown; the message lists the names.
    """
    if name not in _REGISTRY:
        raise ValueError(
            f"Unknown fixture {name!r}; available fixtures are "
            f"{', '.join(fixture_names())}"
        )
    return _REGISTRY[name]()
