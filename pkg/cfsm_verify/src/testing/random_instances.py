"""Seeded random instances for property tests."""

from typing import Sequence

import numpy as np

from cfsm_verify.src import types
from cfsm_verify.src.lang import regex
from cfsm_verify.src.lang.dfa import Dfa
from cfsm_verify.src.lang.recrel import RecRel
from cfsm_verify.src.model.protocol import Channel
from cfsm_verify.src.model.protocol import Machine
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.protocol import Transition
from cfsm_verify.src.model.protocol import receive
from cfsm_verify.src.model.protocol import send


def random_dfa(
    rng: np.random.Generator,
    alphabet: Sequence[types.Symbol],
    num_states: int,
) -> Dfa:
    alphabet = tuple(sorted(set(alphabet)))
    table = rng.integers(0, num_states, size=(num_states, len(alphabet)))
    accepting = rng.random(num_states) < 0.4
    return Dfa(alphabet, table, accepting, 0)


def random_regex(
    rng: np.random.Generator, alphabet: Sequence[types.Symbol], depth: int
) -> regex.Regex:
    """A random parse tree; leaves include `eps` and `empty`."""
    if depth == 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.08:
            return regex.EmptySet()
        if roll < 0.2:
            return regex.Epsilon()
        return regex.Sym(str(rng.choice(list(alphabet))))
    kind = rng.integers(0, 3)
    if kind == 0:
        count = int(rng.integers(2, 4))
        return regex.Alt(
            tuple(random_regex(rng, alphabet, depth - 1) for _ in range(count))
        )
    if kind == 1:
        count = int(rng.integers(2, 4))
        return regex.Concat(
            tuple(random_regex(rng, alphabet, depth - 1) for _ in range(count))
        )
    return regex.Star(random_regex(rng, alphabet, depth - 1))


def random_recrel(
    rng: np.random.Generator,
    channels: Sequence[types.ChannelId],
    alphabets: Sequence[Sequence[types.Symbol]],
    num_terms: int,
    num_states: int = 3,
) -> RecRel:
    """A random union of products of random Dfas."""
    terms = [
        [random_dfa(rng, alphabet, num_states) for alphabet in alphabets]
        for _ in range(num_terms)
    ]
    return RecRel.from_products(channels, alphabets, terms)


def random_cyclic_protocol(
    rng: np.random.Generator,
    max_nodes: int = 3,
    max_states: int = 3,
    max_symbols: int = 2,
) -> Protocol:
    """A random ring `0 -> 1 -> ... -> 0` with small machines.

    Channel `c<i>` runs from node `i` to the next node; its symbols are
    `m<i>_<k>`.
    """
    n = int(rng.integers(2, max_nodes + 1))
    nodes = [str(i) for i in range(n)]
    channels = [
        Channel(f"c{i}", nodes[i], nodes[(i + 1) % n]) for i in range(n)
    ]
    alphabets = {
        c.name: [
            f"m{i}_{k}" for k in range(int(rng.integers(1, max_symbols + 1)))
        ]
        for i, c in enumerate(channels)
    }
    machines = []
    for i, node in enumerate(nodes):
        out, into = channels[i], channels[(i - 1) % n]
        count = int(rng.integers(1, max_states + 1))
        states = [f"{node}{k}" for k in range(count)]
        transitions = set()
        for source in states:
            for _ in range(int(rng.integers(0, 3))):
                target = str(rng.choice(states))
                if rng.random() < 0.5:
                    symbol = str(rng.choice(alphabets[out.name]))
                    action = send(symbol, out.name)
                else:
                    symbol = str(rng.choice(alphabets[into.name]))
                    action = receive(symbol, into.name)
                transitions.add(Transition(source, action, target))
        machines.append(
            Machine(node, states[0], tuple(sorted(transitions)), tuple(states))
        )
    return Protocol(
        name="random-ring",
        nodes=tuple(nodes),
        channels=tuple(channels),
        alphabets=alphabets,
        machines=tuple(machines),
    )


def random_sr_pair(
    rng: np.random.Generator, half_states: int = 2, num_symbols: int = 2
) -> Protocol:
    """A pair of send/receive machines where node 1 mirrors node 0.

    Node 0 alternates between send and receive states along a cycle
    through all its states, plus a few extra edges with fresh labels. Node
    1 has the same diagram with every send turned into a reception and
    vice versa, so both nodes produce the same channel words on every
    cycle through home. Neither machine has a send cycle.
    """
    size = 2 * half_states
    states = [f"{k}" for k in range(size)]
    alpha = [f"d{k}" for k in range(num_symbols)]
    beta = [f"b{k}" for k in range(num_symbols)]
    edges = []
    for k in range(size):
        sending = k % 2 == 0
        symbols = alpha if sending else beta
        targets = [(k + 1) % size]
        extra = int(rng.integers(0, len(symbols)))
        choices = [j for j in range(size) if j % 2 != k % 2]
        targets += [int(rng.choice(choices)) for _ in range(extra)]
        for symbol, target in zip(symbols, targets):
            edges.append((k, sending, symbol, target))

    def machine(node: str, flip: bool) -> Machine:
        transitions = []
        for source, sending, symbol, target in edges:
            channel = "alpha" if sending else "beta"
            action = (
                send(symbol, channel)
                if sending != flip
                else receive(symbol, channel)
            )
            transitions.append(
                Transition(
                    f"{node}{states[source]}", action, f"{node}{states[target]}"
                )
            )
        return Machine(node, f"{node}0", tuple(transitions))

    return Protocol(
        name="random-sr-pair",
        nodes=("0", "1"),
        channels=(Channel("alpha", "0", "1"), Channel("beta", "1", "0")),
        alphabets={"alpha": alpha, "beta": beta},
        machines=(machine("0", False), machine("1", True)),
    )
