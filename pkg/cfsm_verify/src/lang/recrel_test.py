import itertools

import numpy as np
from absl.testing import parameterized

from cfsm_verify.src import config
from cfsm_verify.src import testing
from cfsm_verify.src.errors import ChannelMismatchError
from cfsm_verify.src.errors import ParseError
from cfsm_verify.src.errors import RelationTooLargeError
from cfsm_verify.src.lang import nfa
from cfsm_verify.src.lang import recrel
from cfsm_verify.src.lang.dfa import Dfa
from cfsm_verify.src.testing import random_instances

RecRel = recrel.RecRel

CHANNELS = ("x", "y")
ALPHABETS = (("a", "b"), ("c", "d"))

RING_CHANNELS = ("alpha", "beta", "gamma", "delta")
DATA = ("ED", "EV", "OD")
ACKS = ("EDA", "EVA", "ODA")
RING_ALPHABETS = (DATA, DATA, ACKS, ACKS)


def all_words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(sorted(alphabet), repeat=n)


def all_vectors(alphabets, max_len):
    return itertools.product(*(list(all_words(a, max_len)) for a in alphabets))


def members(relation, max_len):
    return {
        v for v in all_vectors(relation.alphabets, max_len)
        if relation.member(v)
    }


class RecRelTest(testing.TestCase, parameterized.TestCase):
    def random_pair(self, seed):
        rng = np.random.default_rng(seed)
        first = random_instances.random_recrel(rng, CHANNELS, ALPHABETS, 2)
        second = random_instances.random_recrel(rng, CHANNELS, ALPHABETS, 2)
        return first, second

    def test_full_includes_anything(self):
        first, _ = self.random_pair(0)
        self.assertTrue(RecRel.full(CHANNELS, ALPHABETS).includes(first))
        self.assertTrue(first.includes(RecRel.empty(CHANNELS, ALPHABETS)))

    def test_ring_row_membership(self):
        relation = recrel.parse_relation(
            "(ED*, ED*, EDA*, EDA*)", RING_CHANNELS, RING_ALPHABETS
        )
        self.assertTrue(relation.member((("ED",), ("ED",), ("EDA",), ())))
        self.assertFalse(relation.member((("EV",), ("ED",), ("EDA",), ())))

    def test_ring_row_quotient(self):
        relation = recrel.parse_relation(
            "(ED*, ED*, EDA*, EDA*)", RING_CHANNELS, RING_ALPHABETS
        )
        quotient = relation.quotient_channel("alpha", "ED")
        self.assertTrue(quotient.member(((), ("ED",), ("EDA",), ())))
        self.assertTrue(
            relation.quotient_channel("alpha", "EV").is_empty()
        )

    def test_append_to_empty_contents(self):
        alphabets = (("A", "D", "R"), ("A", "D", "R"))
        start = RecRel.from_contents(CHANNELS, alphabets, [((), ())])
        appended = start.append_channel("x", "D")
        self.assertEqual(members(appended, 3), {(("D",), ())})

    @parameterized.parameters(range(40))
    def test_boolean_algebra_matches_oracle(self, seed):
        first, second = self.random_pair(seed)
        first_members = members(first, 3)
        second_members = members(second, 3)
        self.assertEqual(
            members(first.union(second), 3), first_members | second_members
        )
        self.assertEqual(
            members(first.intersect(second), 3),
            first_members & second_members,
        )
        self.assertEqual(
            members(first.difference(second), 3),
            first_members - second_members,
        )
        everything = set(all_vectors(ALPHABETS, 3))
        self.assertEqual(
            members(first.complement(), 3), everything - first_members
        )

    @parameterized.parameters(range(40))
    def test_includes_matches_oracle(self, seed):
        first, second = self.random_pair(seed)
        union = first.union(second)
        self.assertTrue(union.includes(first))
        self.assertTrue(union.includes(second))
        witness = first.inclusion_witness(second)
        if first.includes(second):
            self.assertIsNone(witness)
            self.assertLessEqual(members(second, 3), members(first, 3))
        else:
            self.assertTrue(second.member(witness))
            self.assertFalse(first.member(witness))

    @parameterized.product(seed=tuple(range(20)), channel=CHANNELS)
    def test_channel_transforms_match_oracle(self, seed, channel):
        relation, _ = self.random_pair(seed)
        c = CHANNELS.index(channel)
        for symbol in ALPHABETS[c]:
            quotient = relation.quotient_channel(channel, symbol)
            expected = {
                v
                for v in all_vectors(ALPHABETS, 3)
                if relation.member(
                    v[:c] + ((symbol,) + v[c],) + v[c + 1 :]
                )
            }
            self.assertEqual(members(quotient, 3), expected)

            appended = relation.append_channel(channel, symbol)
            expected = {
                v
                for v in all_vectors(ALPHABETS, 3)
                if v[c][-1:] == (symbol,)
                and relation.member(v[:c] + (v[c][:-1],) + v[c + 1 :])
            }
            self.assertEqual(members(appended, 3), expected)

    @parameterized.parameters(range(20))
    def test_products_round_trip(self, seed):
        relation, _ = self.random_pair(seed)
        rebuilt = RecRel.from_products(
            CHANNELS, ALPHABETS, relation.to_products()
        )
        self.assertEqual(members(rebuilt, 3), members(relation, 3))
        self.assertTrue(rebuilt.equivalent(relation))

    @parameterized.parameters(range(10))
    def test_text_round_trip(self, seed):
        relation, _ = self.random_pair(seed)
        text = recrel.relation_to_text(relation)
        parsed = recrel.parse_relation(text, CHANNELS, ALPHABETS)
        self.assertTrue(parsed.equivalent(relation), text)

    def test_parse_empty(self):
        relation = recrel.parse_relation("empty", CHANNELS, ALPHABETS)
        self.assertTrue(relation.is_empty())
        self.assertEqual(recrel.relation_to_text(relation), "empty")

    @parameterized.named_parameters(
        ("wrong_arity", "(a*)"),
        ("no_parens", "a*, c*"),
        ("unbalanced", "(a*, c*"),
        ("bad_symbol", "(c, c)"),
    )
    def test_parse_errors(self, text):
        with self.assertRaises(ParseError):
            recrel.parse_relation(text, CHANNELS, ALPHABETS)

    def test_restrict_unbounded_is_identity(self):
        relation, _ = self.random_pair(3)
        self.assertIs(relation.restrict_lengths([[None, None]]), relation)

    def test_restrict_recognizable_superset(self):
        alphabets = (("d",), ("b",))
        relation = recrel.parse_relation("(d*, b*)", CHANNELS, alphabets)
        restricted = relation.restrict_lengths([[1, None], [None, 1]])
        expected = {
            v for v in all_vectors(alphabets, 4)
            if len(v[0]) <= 1 or len(v[1]) <= 1
        }
        self.assertEqual(members(restricted, 4), expected)

    def test_restrict_two_message_entry(self):
        alphabets = (("A", "D", "R"), ("A", "D", "R"))
        contents = [
            v for v in all_vectors(alphabets, 2)
            if len(v[0]) + len(v[1]) == 2
        ]
        self.assertLen(contents, 27)
        relation = RecRel.from_contents(CHANNELS, alphabets, contents)
        # Every pair with two messages in total has a component of length
        # at most one, so the disjunctive restriction keeps all of them.
        restricted = relation.restrict_lengths([[1, None], [None, 1]])
        self.assertLen(members(restricted, 2), 27)
        # Requiring both at most one keeps only the mixed pairs.
        both = relation.restrict_lengths([[1, 1]])
        self.assertLen(members(both, 2), 9)

    def test_restrict_needs_a_clause(self):
        relation, _ = self.random_pair(0)
        with self.assertRaises(ValueError):
            relation.restrict_lengths([])
        with self.assertRaises(ChannelMismatchError):
            relation.restrict_lengths([[1]])

    def test_minus_quotient_examples(self):
        alphabets = (("d",), ("b",))
        epsilon = RecRel.from_contents(CHANNELS, alphabets, [((), ())])
        result = recrel.rel_minus_quotient(epsilon, Dfa.epsilon(["d"]))
        self.assertEqual(members(result, 3), {((), ())})

        stars = recrel.parse_relation("(d*, b*)", CHANNELS, alphabets)
        result = recrel.rel_minus_quotient(
            stars, nfa.parse_language("d*", {"d"})
        )
        self.assertTrue(result.equivalent(stars))

        single = RecRel.from_contents(CHANNELS, alphabets, [(("d",), ("b",))])
        result = recrel.rel_minus_quotient(
            single, nfa.parse_language("d . d*", {"d"})
        )
        expected = recrel.parse_relation("(d*, b)", CHANNELS, alphabets)
        self.assertTrue(result.equivalent(expected))

    @parameterized.parameters(range(20))
    def test_minus_quotient_matches_oracle(self, seed):
        relation, _ = self.random_pair(seed)
        rng = np.random.default_rng(seed + 100)
        words = [w for w in all_words(ALPHABETS[0], 3) if rng.random() < 0.3]
        language = Dfa.from_words(ALPHABETS[0], words)
        result = recrel.rel_minus_quotient(relation, language)
        expected = set()
        for x, y in all_vectors(ALPHABETS, 3):
            for word in words:
                for i in range(len(word) + 1):
                    if word[i:] == x and relation.member((word[:i], y)):
                        expected.add((x, y))
        self.assertEqual(members(result, 3), expected)

    def test_minus_quotient_needs_two_channels(self):
        relation = RecRel.full(RING_CHANNELS, RING_ALPHABETS)
        with self.assertRaises(ChannelMismatchError):
            recrel.rel_minus_quotient(relation, Dfa.universal(DATA))

    def test_quotient_languages(self):
        alphabets = (("d",), ("b",))
        relation = RecRel.from_contents(
            CHANNELS, alphabets, [(("d", "d"), ("b",))]
        )
        result = relation.quotient_languages(
            {"x": nfa.parse_language("d*", {"d"})}
        )
        self.assertEqual(
            members(result, 3),
            {(("d", "d"), ("b",)), (("d",), ("b",)), ((), ("b",))},
        )
        self.assertTrue(
            relation.quotient_languages(
                {"y": Dfa.empty(["b"])}
            ).is_empty()
        )

    def test_channel_mismatch(self):
        first, _ = self.random_pair(0)
        other = RecRel.full(("x", "z"), ALPHABETS)
        with self.assertRaises(ChannelMismatchError):
            first.union(other)
        with self.assertRaises(ChannelMismatchError):
            first.member((("a",),))

    def test_size_guard(self):
        config.set_max_relation_vectors(2)
        alphabets = (("a",), ("c",))
        with self.assertRaises(RelationTooLargeError):
            RecRel.from_contents(
                CHANNELS,
                alphabets,
                [((), ()), (("a",), ()), ((), ("c",))],
            )

    def test_witness_and_enumerate(self):
        alphabets = (("d",), ("b",))
        relation = recrel.parse_relation("(d . d*, b)", CHANNELS, alphabets)
        self.assertEqual(relation.witness(), (("d",), ("b",)))
        self.assertEqual(
            relation.enumerate(2),
            {(("d",), ("b",)), (("d", "d"), ("b",))},
        )
        self.assertIsNone(RecRel.empty(CHANNELS, alphabets).witness())
