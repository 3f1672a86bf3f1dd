from absl.testing import parameterized

from cfsm_verify.src import testing
from cfsm_verify.src.errors import HypothesisError
from cfsm_verify.src.gen.fixtures import fixture
from cfsm_verify.src.lang.dfa import Dfa
from cfsm_verify.src.lang.recrel import RecRel
from cfsm_verify.src.proofs import tables


def flowctl2():
    return fixture("flowctl2").protocol


class RestrictionTest(testing.TestCase, parameterized.TestCase):
    def test_admits(self):
        restriction = tables.Restriction(((2, 0), (0, None)))
        self.assertTrue(restriction.admits((("a", "b"), ())))
        self.assertTrue(restriction.admits(((), ("c",) * 9)))
        self.assertFalse(restriction.admits((("a",), ("c",))))

    def test_relation(self):
        relation = tables.Restriction(((1, None),)).relation(
            ("x", "y"), (("a",), ("b",))
        )
        self.assertTrue(relation.member((("a",), ("b",) * 5)))
        self.assertFalse(relation.member((("a", "a"), ())))

    def test_no_clauses(self):
        with self.assertRaisesRegex(ValueError, "at least one clause"):
            tables.Restriction(())

    def test_negative_cap(self):
        with self.assertRaisesRegex(ValueError, "nonnegative"):
            tables.Restriction(((1, -1),))


class TableTest(testing.TestCase, parameterized.TestCase):
    def test_regular_default_empty(self):
        table = tables.RegularTable(
            "alpha", ("b", "a"), {("00", "10"): Dfa.epsilon(("a", "b"))}
        )
        self.assertEqual(table.alphabet, ("a", "b"))
        self.assertIsNone(table.entry(("00", "11")))
        self.assertTrue(table.entry(("00", "10")).accepts(()))
        padded = tables.RegularTable(
            "alpha", ("a", "b"), {}, default_empty=True
        )
        self.assertTrue(padded.entry(("00", "11")).is_empty())

    def test_regular_alphabet_mismatch(self):
        with self.assertRaisesRegex(ValueError, "alpha"):
            tables.RegularTable(
                "alpha", ("a",), {("00",): Dfa.epsilon(("a", "b"))}
            )

    def test_recognizable_channel_mismatch(self):
        relation = RecRel.full(("x",), (("a",),))
        with self.assertRaisesRegex(ValueError, "channels"):
            tables.RecognizableTable(
                ("x", "y"), (("a",), ("b",)), {("00",): relation}
            )

    def test_two_index_sets(self):
        with self.assertRaisesRegex(ValueError, "not both"):
            tables.RecognizableTable(
                ("x",),
                (("a",),),
                {},
                v_sets={"0": {"00"}},
                feedback=[("00",)],
            )

    def test_partial(self):
        full = tables.RecognizableTable(("x",), (("a",),), {})
        self.assertFalse(full.is_partial)
        by_feedback = tables.RecognizableTable(
            ("x",), (("a",),), {}, feedback=[["00"]]
        )
        self.assertTrue(by_feedback.is_partial)
        self.assertEqual(by_feedback.feedback, frozenset({("00",)}))


class IndexSetTest(testing.TestCase, parameterized.TestCase):
    def test_product(self):
        found = tables.index_set(
            flowctl2(), {"0": {"00", "03"}, "1": {"10", "13"}}
        )
        self.assertEqual(
            found,
            {("00", "10"), ("00", "13"), ("03", "10"), ("03", "13")},
        )

    def test_missing_node(self):
        with self.assertRaisesRegex(HypothesisError, "node 1"):
            tables.index_set(flowctl2(), {"0": {"00", "03"}})

    def test_missing_send_target(self):
        with self.assertRaisesRegex(HypothesisError, "03"):
            tables.index_set(flowctl2(), {"0": {"00"}, "1": {"10", "13"}})

    def test_unknown_node(self):
        with self.assertRaisesRegex(ValueError, "unknown nodes"):
            tables.index_set(
                flowctl2(),
                {"0": {"00", "03"}, "1": {"10", "13"}, "7": {"70"}},
            )

    def test_unknown_state(self):
        with self.assertRaisesRegex(ValueError, "no states"):
            tables.index_set(
                flowctl2(), {"0": {"00", "03", "09"}, "1": {"10", "13"}}
            )


class ObligationsTest(testing.TestCase, parameterized.TestCase):
    def obligations(self):
        def fails(witness):
            return lambda: witness

        return [
            (("1",), ("2",), "b", fails(None)),
            (("1",), ("3",), "b", fails(("x",))),
            (("0",), ("3",), "a", fails(("y", "z"))),
        ]

    @parameterized.parameters(1, 2, 8)
    def test_sorted_violations(self, threads):
        result = tables.check_obligations(self.obligations(), threads)
        self.assertFalse(result.ok)
        self.assertEqual(result.checked, 3)
        self.assertEqual(
            [(v.source, v.witness) for v in result.violations],
            [(("0",), ("y", "z")), (("1",), ("x",))],
        )

    def test_nothing_to_check(self):
        result = tables.check_obligations([])
        self.assertTrue(result.ok)
        self.assertEqual(result.checked, 0)

    def test_threads(self):
        with self.assertRaisesRegex(ValueError, "threads"):
            tables.check_obligations(self.obligations(), threads=0)

    def test_violation_text(self):
        violation = tables.Violation(("00", "10"), ("03", "10"), "s", ("a",))
        self.assertEqual(
            str(violation), "(00,10) --s--> (03,10): ('a',) is missing"
        )


class LocalMovesTest(testing.TestCase, parameterized.TestCase):
    def test_flowctl2(self):
        protocol = flowctl2()
        moves = list(tables.local_moves(protocol))
        # 11 transitions per node, each under 5 states of the other node.
        self.assertLen(moves, 110)
        for source, target, i, t in moves:
            self.assertEqual(source[i], t.source)
            self.assertEqual(target[i], t.target)
            self.assertEqual(source[1 - i], target[1 - i])
        self.assertIn(
            "node 0 00 -D_a@alpha 03",
            {tables.step_text(protocol.nodes[i], t) for _, _, i, t in moves},
        )
