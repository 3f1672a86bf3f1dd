from absl.testing import parameterized

from cfsm_verify.src import testing
from cfsm_verify.src.gen.fixtures import fixture
from cfsm_verify.src.model import validation
from cfsm_verify.src.model.protocol import Channel
from cfsm_verify.src.model.protocol import Machine
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.protocol import Transition
from cfsm_verify.src.model.protocol import receive
from cfsm_verify.src.model.protocol import send
from cfsm_verify.src.model.protocol_file import parse_protocol

PAIR = """\
protocol pair
node 0
node 1
channel alpha from 0 to 1
channel beta from 1 to 0
alphabet alpha a
alphabet beta b
machine 0 start 00
trans 0 00 -a@alpha 01
trans 0 01 +b@beta 00
machine 1 start 10
trans 1 10 +a@alpha 11
trans 1 11 -b@beta 10
"""


def codes(protocol):
    return [d.code for d in validation.validate(protocol)]


class ValidateTest(testing.TestCase, parameterized.TestCase):
    def test_well_formed(self):
        self.assertEqual(validation.validate(parse_protocol(PAIR)), [])

    @parameterized.named_parameters(
        ("duplicate_node", "node 1\n", "node 1\nnode 1\n", "duplicate-node"),
        (
            "self_loop",
            "channel beta from 1 to 0",
            "channel beta from 1 to 0\nchannel gamma from 1 to 1\n"
            "alphabet gamma c",
            "self-loop-channel",
        ),
        (
            "unknown_node",
            "channel beta from 1 to 0",
            "channel beta from 1 to 0\nchannel gamma from 1 to 7\n"
            "alphabet gamma c",
            "unknown-node",
        ),
        ("overlap", "alphabet beta b", "alphabet beta b a", "alphabet-overlap"),
        (
            "empty_alphabet",
            "channel beta from 1 to 0",
            "channel beta from 1 to 0\nchannel gamma from 1 to 0",
            "empty-alphabet",
        ),
        (
            "bad_symbol",
            "alphabet beta b",
            "alphabet beta b eps",
            "bad-symbol",
        ),
        (
            "foreign_alphabet",
            "alphabet beta b",
            "alphabet beta b\nalphabet gamma c",
            "unknown-channel",
        ),
        (
            "symbol",
            "trans 0 00 -a@alpha 01",
            "trans 0 00 -z@alpha 01",
            "symbol-not-in-alphabet",
        ),
        (
            "wrong_tail",
            "trans 1 11 -b@beta 10",
            "trans 1 11 -a@alpha 10",
            "send-wrong-tail",
        ),
        (
            "wrong_head",
            "trans 0 01 +b@beta 00",
            "trans 0 01 +a@alpha 00",
            "receive-wrong-head",
        ),
        (
            "unknown_channel",
            "trans 0 01 +b@beta 00",
            "trans 0 01 +b@gamma 00",
            "unknown-channel",
        ),
    )
    def test_diagnostic(self, old, new, code):
        protocol = parse_protocol(PAIR.replace(old, new, 1))
        self.assertIn(code, codes(protocol))

    def test_missing_machine(self):
        protocol = parse_protocol(PAIR.split("machine 1")[0])
        self.assertEqual(codes(protocol), ["missing-machine"])
        self.assertEqual(
            str(validation.validate(protocol)[0]),
            "missing-machine: node 1 has no machine",
        )

    def test_unknown_machine(self):
        protocol = parse_protocol(
            PAIR + "machine 5 start 50\ntrans 5 50 -a@alpha 50\n"
        )
        self.assertEqual(codes(protocol), ["unknown-node"])

    def test_duplicate_machine(self):
        protocol = parse_protocol(PAIR)
        doubled = protocol.replace_machines(
            protocol.machines + (protocol.machine("1"),)
        )
        self.assertEqual(codes(doubled), ["duplicate-machine"])

    def test_unreachable_states_only_warn(self):
        protocol = parse_protocol(PAIR + "state 0 09\n")
        self.assertEqual(validation.validate(protocol), [])

    @parameterized.parameters(
        "access", "flowctl2", "counter", "chain-demo", "altbit-turns"
    )
    def test_fixtures(self, name):
        self.assertEqual(validation.validate(fixture(name).protocol), [])


class SrChecksTest(testing.TestCase, parameterized.TestCase):
    def test_passes(self):
        report = validation.sr_checks(parse_protocol(PAIR).machine("0"))
        self.assertTrue(report.passes)

    def test_violations(self):
        machine = Machine(
            "0",
            "00",
            (
                Transition("00", send("a", "alpha"), "01"),
                Transition("00", send("a", "alpha"), "02"),
                Transition("01", receive("b", "beta"), "00"),
                Transition("01", send("a", "alpha"), "00"),
            ),
        )
        report = validation.sr_checks(machine)
        self.assertEqual(report.mixed_states, ("01",))
        self.assertEqual(report.nondet_labels, (("00", "-a@alpha"),))
        self.assertFalse(report.strongly_connected)
        self.assertFalse(report.passes)


class ClassifyTest(testing.TestCase, parameterized.TestCase):
    @parameterized.named_parameters(
        ("pair", "access", True, True),
        ("ring", "altbit-turns", True, False),
        ("parallel", "counter", False, False),
        ("fan_in", "chain-demo", False, False),
    )
    def test_fixtures(self, name, cyclic, sr_pair):
        report = validation.classify(fixture(name).protocol)
        self.assertEqual(report.is_cyclic, cyclic)
        self.assertEqual(report.is_sr_pair, sr_pair)

    def test_in_degrees(self):
        report = validation.classify(fixture("chain-demo").protocol)
        self.assertEqual(
            report.node_in_degrees, {"1": 1, "2": 2, "3": 1, "4": 1}
        )

    def test_sr_pair_channels(self):
        self.assertEqual(
            validation.sr_pair_channels(parse_protocol(PAIR)),
            ("alpha", "beta"),
        )
        with self.assertRaisesRegex(ValueError, "send/receive"):
            validation.sr_pair_channels(fixture("counter").protocol)

    def test_single_node(self):
        protocol = Protocol(
            name="lonely",
            nodes=("0",),
            channels=(Channel("c", "0", "0"),),
            alphabets={"c": ("a",)},
            machines=(
                Machine("0", "00", (Transition("00", send("a", "c"), "00"),)),
            ),
        )
        self.assertFalse(validation.classify(protocol).is_cyclic)
        self.assertIn("self-loop-channel", codes(protocol))
