import functools
import itertools

import numpy as np
from absl.testing import parameterized

from cfsm_verify.src import testing
from cfsm_verify.src.errors import RegexSyntaxError
from cfsm_verify.src.lang import nfa
from cfsm_verify.src.lang import regex
from cfsm_verify.src.testing import random_instances


@functools.lru_cache(maxsize=None)
def matches(node: regex.Regex, word: tuple[str, ...]) -> bool:
    """Direct recursive matcher, independent of the automata code."""
    if isinstance(node, regex.EmptySet):
        return False
    if isinstance(node, regex.Epsilon):
        return word == ()
    if isinstance(node, regex.Sym):
        return word == (node.symbol,)
    if isinstance(node, regex.Alt):
        return any(matches(option, word) for option in node.options)
    if isinstance(node, regex.Concat):
        head, rest = node.parts[0], node.parts[1:]
        if not rest:
            return matches(head, word)
        tail = rest[0] if len(rest) == 1 else regex.Concat(rest)
        return any(
            matches(head, word[:i]) and matches(tail, word[i:])
            for i in range(len(word) + 1)
        )
    if isinstance(node, regex.Star):
        return word == () or any(
            matches(node.inner, word[:i]) and matches(node, word[i:])
            for i in range(1, len(word) + 1)
        )
    raise TypeError(node)


def all_words(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(sorted(alphabet), repeat=n)


class RegexTest(testing.TestCase, parameterized.TestCase):
    def test_parse_eps(self):
        self.assertEqual(regex.parse_regex("eps", {"a"}), regex.Epsilon())

    def test_parse_star_concat(self):
        self.assertEqual(
            regex.parse_regex("ED* . EV*", {"ED", "EV"}),
            regex.Concat(
                (regex.Star(regex.Sym("ED")), regex.Star(regex.Sym("EV")))
            ),
        )

    def test_precedence(self):
        node = regex.parse_regex("a | b . b", {"a", "b"})
        self.assertEqual(
            node,
            regex.Alt(
                (
                    regex.Sym("a"),
                    regex.Concat((regex.Sym("b"), regex.Sym("b"))),
                )
            ),
        )
        dfa = nfa.compile_regex(node, {"a", "b"})
        for word in all_words({"a", "b"}, 3):
            self.assertEqual(dfa.accepts(word), word in {("a",), ("b", "b")})

    def test_star_binds_tighter_than_concat(self):
        node = regex.parse_regex("a . b*", {"a", "b"})
        self.assertEqual(
            node, regex.Concat((regex.Sym("a"), regex.Star(regex.Sym("b"))))
        )

    @parameterized.named_parameters(
        ("juxtaposition", "a b", 2),
        ("unclosed", "(a", 2),
        ("unknown_symbol", "a . c", 4),
        ("empty_text", "   ", 0),
        ("reserved_char", "a @ b", 2),
        ("dangling_union", "a |", 3),
        ("leading_star", "* a", 0),
        ("no_plus_operator", "a+", 1),
        ("no_optional_operator", "a . b?", 4),
    )
    def test_syntax_errors(self, text, position):
        with self.assertRaises(RegexSyntaxError) as context:
            regex.parse_regex(text, {"a", "b"})
        self.assertEqual(context.exception.position, position)

    def test_syntax_error_is_value_error(self):
        with self.assertRaises(ValueError):
            regex.parse_regex("(", {"a"})

    @parameterized.parameters(range(20))
    def test_print_parse_round_trip(self, seed):
        rng = np.random.default_rng(seed)
        node = random_instances.random_regex(rng, ["a", "b", "c"], 4)
        text = regex.to_text(node)
        self.assertEqual(regex.parse_regex(text, {"a", "b", "c"}), node)

    def test_printer_format(self):
        node = regex.parse_regex("(ED | EV)* . OD", {"ED", "EV", "OD"})
        self.assertEqual(regex.to_text(node), "(ED | EV)* . OD")

    def test_compile_empty_set(self):
        dfa = nfa.compile_regex(regex.EmptySet(), {"a"})
        self.assertEqual(dfa.num_states, 1)
        self.assertFalse(dfa.accepting.any())

    def test_compile_star(self):
        dfa = nfa.parse_language("(d)*", {"d", "b"})
        self.assertEqual(dfa.num_states, 2)
        for word in all_words({"d", "b"}, 4):
            self.assertEqual(dfa.accepts(word), "b" not in word)

    def test_compile_star_entry(self):
        dfa = nfa.parse_language("ED*", {"ED"})
        self.assertTrue(dfa.accepts(()))
        self.assertTrue(dfa.accepts(("ED",)))
        self.assertTrue(dfa.accepts(("ED", "ED")))

    def test_compile_rejects_foreign_alphabet(self):
        with self.assertRaises(ValueError):
            nfa.compile_regex(regex.Sym("z"), {"a"})

    @parameterized.product(seed=tuple(range(100)), size=(1, 2, 3))
    def test_membership_matches_oracle(self, seed, size):
        alphabet = ["a", "b", "c"][:size]
        rng = np.random.default_rng(1000 * size + seed)
        node = random_instances.random_regex(rng, alphabet, 3)
        dfa = nfa.compile_regex(node, alphabet)
        max_len = 6 if size < 3 else 5
        for word in all_words(alphabet, max_len):
            self.assertEqual(
                dfa.accepts(word),
                matches(node, word),
                f"{regex.to_text(node)} on {word}",
            )

    @parameterized.parameters(range(25))
    def test_to_regex_preserves_language(self, seed):
        rng = np.random.default_rng(seed)
        dfa = random_instances.random_dfa(rng, ["a", "b"], 4)
        node = regex.to_regex(dfa)
        self.assertTrue(
            nfa.compile_regex(node, ["a", "b"]).equivalent(dfa),
            regex.to_text(node),
        )

    def test_to_regex_of_empty_language(self):
        dfa = nfa.parse_language("empty", {"a"})
        self.assertEqual(regex.to_regex(dfa), regex.EmptySet())

    def test_identifiers(self):
        self.assertTrue(regex.is_identifier("EVA_g"))
        self.assertFalse(regex.is_identifier("eps"))
        self.assertFalse(regex.is_identifier("a+b"))
        self.assertFalse(regex.is_identifier(""))
