import networkx as nx
import numpy as np
from absl.testing import parameterized

from cfsm_verify.src import testing
from cfsm_verify.src.gen.fixtures import fixture
from cfsm_verify.src.model.protocol import Action
from cfsm_verify.src.model.protocol import Machine
from cfsm_verify.src.model.protocol import Transition
from cfsm_verify.src.model.protocol import receive
from cfsm_verify.src.model.protocol import send
from cfsm_verify.src.sr import projection
from cfsm_verify.src.testing.random_instances import random_sr_pair

LABELS = [
    receive("d1", "alpha"),
    receive("d2", "alpha"),
    send("b1", "beta"),
    receive("d1", "alpha"),
    send("b2", "beta"),
    send("b2", "beta"),
]

ONE_ROUND = Machine(
    "0",
    "h",
    (
        Transition("h", send("d", "alpha"), "p"),
        Transition("p", receive("b", "beta"), "h"),
    ),
)

TWO_ACKS = Machine(
    "1",
    "h",
    (
        Transition("h", receive("d", "alpha"), "q"),
        Transition("q", send("b", "beta"), "r"),
        Transition("r", send("b", "beta"), "h"),
    ),
)


class ProjectTest(testing.TestCase, parameterized.TestCase):
    def test_mixed_sequence(self):
        self.assertEqual(
            projection.project(LABELS, "alpha"), ("d1", "d2", "d1")
        )
        self.assertEqual(
            projection.project(LABELS, "beta"), ("b1", "b2", "b2")
        )

    def test_empty_sequence(self):
        self.assertEqual(projection.project([], "alpha"), ())

    def test_projection_record(self):
        found = projection.Projection.of(LABELS[:2], ["beta"])
        self.assertEqual(found.source, tuple(LABELS[:2]))
        self.assertEqual(
            dict(found.per_channel), {"beta": (), "alpha": ("d1", "d2")}
        )

    def test_distributes_over_concatenation(self):
        rng = np.random.default_rng(3)
        pool = [Action.parse(text) for text in ("-x@a", "+y@b", "-z@a")]
        for _ in range(50):
            u = [pool[i] for i in rng.integers(0, 3, size=rng.integers(5))]
            v = [pool[i] for i in rng.integers(0, 3, size=rng.integers(5))]
            for channel in ("a", "b"):
                self.assertEqual(
                    projection.project(u + v, channel),
                    projection.project(u, channel)
                    + projection.project(v, channel),
                )


class CyclesTest(testing.TestCase, parameterized.TestCase):
    def test_self_loop(self):
        machine = Machine("1", "s", (Transition("s", send("b", "beta"), "s"),))
        self.assertEqual(projection.send_cycles(machine), [("s",)])
        self.assertEqual(projection.receive_cycles(machine), [])

    def test_cycles_are_listed_once(self):
        self.assertEqual(projection.send_cycles(TWO_ACKS), [])
        self.assertEqual(projection.receive_cycles(TWO_ACKS), [])
        machine = Machine(
            "0",
            "b",
            (
                Transition("b", send("x", "alpha"), "a"),
                Transition("a", send("y", "alpha"), "b"),
                Transition("a", receive("z", "beta"), "a"),
            ),
        )
        self.assertEqual(projection.send_cycles(machine), [("a", "b")])
        self.assertEqual(projection.receive_cycles(machine), [("a",)])

    def test_tag_simulation_has_no_send_cycles(self):
        protocol = fixture("tag-demo").protocol
        for machine in protocol.machines:
            self.assertEqual(projection.send_cycles(machine), [])

    def test_turn_taking_process_has_send_cycles(self):
        machine = fixture("altbit-turns").protocol.machine("0")
        self.assertIn(("00",), projection.send_cycles(machine))

    def test_no_send_cycle_bounds_consecutive_sends(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            for machine in random_sr_pair(rng, half_states=3).machines:
                self.assertEqual(projection.send_cycles(machine), [])
                sends = nx.DiGraph(
                    [
                        (t.source, t.target)
                        for t in machine.transitions
                        if t.action.is_send
                    ]
                )
                if sends.number_of_edges():
                    self.assertLess(
                        nx.dag_longest_path_length(sends),
                        len(machine.states),
                    )


class CycleProjectionsTest(testing.TestCase, parameterized.TestCase):
    def test_one_round(self):
        self.assertEqual(
            projection.cycle_projections(ONE_ROUND, ["alpha", "beta"], 4),
            {((), ()), (("d",), ("b",)), (("d", "d"), ("b", "b"))},
        )

    def test_two_acknowledgements(self):
        self.assertEqual(
            projection.cycle_projections(TWO_ACKS, ["alpha", "beta"], 3),
            {((), ()), (("d",), ("b", "b"))},
        )
        self.assertNotEqual(
            projection.cycle_projections(TWO_ACKS, ["alpha", "beta"], 6),
            projection.cycle_projections(ONE_ROUND, ["alpha", "beta"], 6),
        )

    def test_mirrored_machines_agree(self):
        rng = np.random.default_rng(9)
        for _ in range(5):
            first, second = random_sr_pair(rng).machines
            self.assertEqual(
                projection.cycle_projections(first, ["alpha", "beta"], 6),
                projection.cycle_projections(second, ["alpha", "beta"], 6),
            )

    def test_negative_length(self):
        with self.assertRaisesRegex(ValueError, "max_len"):
            projection.cycle_projections(ONE_ROUND, ["alpha"], -1)
