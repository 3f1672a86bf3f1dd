import functools

from absl.testing import parameterized

from cfsm_verify.src import testing
from cfsm_verify.src.errors import HypothesisError
from cfsm_verify.src.explore.state_space import reach
from cfsm_verify.src.gen.fixtures import fixture
from cfsm_verify.src.lang.dfa import Dfa
from cfsm_verify.src.model.protocol_file import parse_protocol
from cfsm_verify.src.proofs import regular
from cfsm_verify.src.proofs.deadlock import prove_deadlock_free
from cfsm_verify.src.proofs.proof_file import parse_proof
from cfsm_verify.src.proofs.tables import RegularTable

ONE_WAY = """\
protocol one-way
node 0
node 1
channel alpha from 0 to 1
alphabet alpha d
machine 0 start 00
trans 0 00 -d@alpha 00
machine 1 start 10
trans 1 10 +d@alpha 10
"""


def flowctl2():
    return fixture("flowctl2").protocol


def reachable_table(protocol, channel):
    """The contents of `channel` with the other channels empty."""
    c = protocol.channel_index(channel)
    words = {s: set() for s in protocol.composite_states()}
    for state in reach(protocol).states:
        others = state.contents[:c] + state.contents[c + 1 :]
        if not any(others):
            words[state.composite].add(state.contents[c])
    alphabet = protocol.alphabet(channel)
    entries = {s: Dfa.from_words(alphabet, w) for s, w in words.items()}
    return RegularTable(channel, alphabet, entries)


@functools.lru_cache(maxsize=None)
def altbit_turns_extension():
    item = fixture("altbit-turns")
    table = parse_proof(item.proof, item.protocol)
    return regular.extend_regular(item.protocol, "alpha", table)


class HGraphTest(testing.TestCase, parameterized.TestCase):
    def test_flowctl2(self):
        graph = regular.h_graph(flowctl2(), "alpha")
        self.assertLen(graph, 25)
        self.assertEqual(graph.number_of_edges(), 10)
        self.assertTrue(graph.has_edge(("00", "10"), ("01", "13")))
        self.assertTrue(graph.has_edge(("03", "11"), ("00", "10")))
        for _, _, key in graph.edges(keys=True):
            self.assertEqual(key[0], "beta")

    def test_only_channel(self):
        graph = regular.h_graph(parse_protocol(ONE_WAY), "alpha")
        self.assertEqual(graph.number_of_edges(), 0)

    def test_ring_relays(self):
        protocol = fixture("altbit-turns").protocol
        graph = regular.h_graph(protocol, "alpha")
        channels = {key[0] for _, _, key in graph.edges(keys=True)}
        self.assertEqual(channels, {"beta", "gamma", "delta"})
        # Demon 2 hands `EV` over to node 1 waiting in 14.
        self.assertTrue(
            graph.has_edge(("00", "14", "21", "30"), ("00", "13", "20", "30"))
        )


class CheckRegularConsistencyTest(testing.TestCase, parameterized.TestCase):
    def test_universal_sets(self):
        protocol = flowctl2()
        alphabet = protocol.alphabet("alpha")
        table = RegularTable(
            "alpha",
            alphabet,
            {s: Dfa.universal(alphabet) for s in protocol.composite_states()},
        )
        result = regular.check_regular_consistency(protocol, "alpha", table)
        self.assertTrue(result.ok)
        self.assertGreater(result.checked, 0)

    @parameterized.parameters("alpha", "beta")
    def test_reachable_contents(self, channel):
        protocol = flowctl2()
        table = reachable_table(protocol, channel)
        self.assertTrue(
            regular.check_regular_consistency(protocol, channel, table).ok
        )

    def test_send_violation(self):
        protocol = flowctl2()
        alphabet = protocol.alphabet("alpha")
        table = RegularTable(
            "alpha",
            alphabet,
            {("00", "10"): Dfa.epsilon(alphabet)},
            default_empty=True,
        )
        result = regular.check_regular_consistency(protocol, "alpha", table)
        self.assertFalse(result.ok)
        steps = {(v.source, v.target, v.step): v for v in result.violations}
        found = steps[(("00", "10"), ("03", "10"), "node 0 00 -D_a@alpha 03")]
        self.assertEqual(found.witness, ("D_a",))
        self.assertEqual(list(result.violations), sorted(result.violations))

    def test_threads_do_not_change_the_result(self):
        protocol = flowctl2()
        alphabet = protocol.alphabet("alpha")
        table = RegularTable(
            "alpha",
            alphabet,
            {("00", "10"): Dfa.universal(alphabet)},
            default_empty=True,
        )
        serial = regular.check_regular_consistency(protocol, "alpha", table)
        parallel = regular.check_regular_consistency(
            protocol, "alpha", table, threads=4
        )
        self.assertEqual(serial, parallel)

    def test_not_cyclic(self):
        protocol = fixture("chain-demo").protocol
        table = RegularTable(
            "alpha", protocol.alphabet("alpha"), {}, default_empty=True
        )
        with self.assertRaises(HypothesisError):
            regular.check_regular_consistency(protocol, "alpha", table)

    def test_partial_table(self):
        protocol = flowctl2()
        table = RegularTable("alpha", protocol.alphabet("alpha"), {})
        with self.assertRaisesRegex(ValueError, "no entry"):
            regular.check_regular_consistency(protocol, "alpha", table)
        partial = RegularTable(
            "alpha",
            protocol.alphabet("alpha"),
            {},
            v_sets={"0": {"00"}, "1": {"10"}},
        )
        with self.assertRaisesRegex(ValueError, "partial"):
            regular.check_regular_consistency(protocol, "alpha", partial)


class ExtendRegularTest(testing.TestCase, parameterized.TestCase):
    def test_all_states_declared(self):
        protocol = flowctl2()
        exact = reachable_table(protocol, "alpha")
        v_sets = {n: protocol.machine(n).states for n in protocol.nodes}
        partial = RegularTable(
            "alpha", exact.alphabet, exact.entries, v_sets=v_sets
        )
        extension = regular.extend_regular(protocol, "alpha", partial)
        self.assertTrue(extension.extended)
        for composite in protocol.composite_states():
            self.assertTrue(
                extension.table.entry(composite).equivalent(
                    exact.entry(composite)
                ),
                composite,
            )

    def test_smallest_completion(self):
        protocol = flowctl2()
        exact = reachable_table(protocol, "alpha")
        # Node 0 sends into 00 and 03, node 1 into 10 and 13.
        v_sets = {"0": {"00", "03"}, "1": {"10", "13"}}
        declared = {
            s: exact.entry(s)
            for s in [("00", "10"), ("00", "13"), ("03", "10"), ("03", "13")]
        }
        partial = RegularTable(
            "alpha", exact.alphabet, declared, v_sets=v_sets
        )
        extension = regular.extend_regular(protocol, "alpha", partial)
        self.assertTrue(extension.extended)
        for composite in protocol.composite_states():
            self.assertTrue(
                exact.entry(composite).includes(
                    extension.table.entry(composite)
                ),
                composite,
            )
        self.assertTrue(
            extension.table.entry(("01", "13")).accepts(())
        )

    def test_not_extendable(self):
        protocol = flowctl2()
        alphabet = protocol.alphabet("alpha")
        partial = RegularTable(
            "alpha",
            alphabet,
            {("00", "10"): Dfa.epsilon(alphabet)},
            v_sets={"0": {"00", "03"}, "1": {"10", "13"}},
            default_empty=True,
        )
        extension = regular.extend_regular(protocol, "alpha", partial)
        self.assertFalse(extension.extended)
        self.assertIsNotNone(extension.consistency.violations[0].witness)

    def test_hypothesis(self):
        protocol = flowctl2()
        partial = RegularTable(
            "alpha",
            protocol.alphabet("alpha"),
            {},
            v_sets={"0": {"00"}, "1": {"10", "13"}},
            default_empty=True,
        )
        with self.assertRaisesRegex(HypothesisError, "send target"):
            regular.extend_regular(protocol, "alpha", partial)

    def test_entries_outside_the_index_set(self):
        protocol = flowctl2()
        alphabet = protocol.alphabet("alpha")
        partial = RegularTable(
            "alpha",
            alphabet,
            {("01", "10"): Dfa.epsilon(alphabet)},
            v_sets={"0": {"00", "03"}, "1": {"10", "13"}},
            default_empty=True,
        )
        with self.assertRaisesRegex(ValueError, "outside"):
            regular.extend_regular(protocol, "alpha", partial)

    def test_altbit_turns(self):
        protocol = fixture("altbit-turns").protocol
        extension = altbit_turns_extension()
        self.assertTrue(extension.extended, extension.consistency.violations)
        self.assertLen(list(protocol.composite_states()), 1764)
        table = extension.table
        for composite in protocol.composite_states():
            self.assertIsNotNone(table.entry(composite))
        initial = table.entry(protocol.initial_composite)
        self.assertTrue(initial.accepts(()))
        self.assertTrue(initial.accepts(("OD_a", "EV_a", "EV_a")))


class ProveNotStableTest(testing.TestCase, parameterized.TestCase):
    def test_altbit_turns_is_deadlock_free(self):
        protocol = fixture("altbit-turns").protocol
        table = altbit_turns_extension().table
        certificate = regular.prove_not_stable(
            protocol, "alpha", table, ("04", "14", "20", "30")
        )
        self.assertTrue(certificate.certified)
        proof = prove_deadlock_free(protocol, table)
        self.assertTrue(proof.deadlock_free)
        self.assertEqual(
            [c.composite for c in proof.certificates],
            [("04", "14", "20", "30")],
        )

    def test_flowctl2(self):
        protocol = flowctl2()
        table = reachable_table(protocol, "alpha")
        certificate = regular.prove_not_stable(
            protocol, "alpha", table, ("00", "13")
        )
        self.assertTrue(certificate.certified)
        silent = regular.prove_not_stable(
            protocol, "alpha", table, protocol.initial_composite
        )
        self.assertFalse(silent.certified)
        self.assertEqual(silent.witness, ())

    def test_malformed(self):
        protocol = flowctl2()
        alphabet = protocol.alphabet("alpha")
        table = RegularTable("alpha", alphabet, {}, default_empty=True)
        with self.assertRaisesRegex(HypothesisError, "Malformed"):
            regular.prove_not_stable(protocol, "alpha", table, ("00", "13"))
