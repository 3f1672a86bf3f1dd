"""Affinity, deadlock-freedom and bounded channels of send/receive pairs.

Two send/receive machines `F0` (node 0, sending on `alpha`) and `F1` are
affine if their home-to-home label sequences project onto the same set of
`(alpha word, beta word)` pairs. For affine machines with `k0` and `k1`
states, a channel holding `k0 * (k1 - 1) + 1` symbols while the other one
is empty forces a send cycle. Without send cycles the explored space is
therefore finite below that threshold, and whatever exceeds it refutes
affinity.
"""

import collections
import dataclasses
from typing import Optional

from absl import logging

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.explore.properties import deadlocks
from cfsm_verify.src.explore.state_space import Budget
from cfsm_verify.src.explore.state_space import GlobalState
from cfsm_verify.src.explore.state_space import StateGraph
from cfsm_verify.src.explore.state_space import reach
from cfsm_verify.src.model.protocol import Action
from cfsm_verify.src.model.protocol import Machine
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.validation import sr_pair_channels
from cfsm_verify.src.sr.projection import send_cycles

# What the leading machine has exchanged on each channel that the
# following machine has not matched yet.
_Config = tuple[types.StateName, types.Word, types.Word]


@cfsm_verify_export("cfsm_verify.sr.growth_bound")
def growth_bound(protocol: Protocol, reverse: bool = False) -> int:
    """The threshold `k0 * (k1 - 1) + 1` on the length of `alpha`.

    With `reverse=True`, the symmetric threshold `k1 * (k0 - 1) + 1` on
    `beta`. If affine machines without send cycles reach a state where the
    channel is that long and the other one is empty, there is a
    contradiction.

    Raises:
        ValueError: if `protocol` is not a pair of send/receive machines.
    """
    sr_pair_channels(protocol)
    k0, k1 = (len(protocol.machine(n).states) for n in protocol.nodes)
    if reverse:
        k0, k1 = k1, k0
    return k0 * (k1 - 1) + 1


@cfsm_verify_export("cfsm_verify.sr.Inclusion")
@dataclasses.dataclass(frozen=True)
class Inclusion:
    """Whether one machine's cycle projections include another's.

    Attributes:
        holds: `None` if the balance bound was exceeded before a
            counterexample could be confirmed.
        witness: A projection pair of the included machine that the other
            one cannot produce.
    """

    holds: Optional[bool]
    witness: Optional[tuple[types.Word, types.Word]] = None


@cfsm_verify_export("cfsm_verify.sr.BalanceAutomaton")
class BalanceAutomaton:
    """Compares the cycle projections of a pair with a bounded balance.

    A leading machine walks its diagram. Alongside it, every path of the
    other machine that consumes the words the leader has exchanged so far
    is tracked, together with the balance: the symbols per channel that
    the follower has not matched yet. The leader's projections are
    included in the follower's iff every leader path back home is matched
    by a follower path back home with an empty balance.

    A follower that matches a leader path does so with some balance;
    paths needing more than `bound` symbols are dropped and make a
    negative answer undetermined.

    Args:
        protocol: A pair of send/receive machines.
        bound: The largest balance per channel; defaults to the larger
            `growth_bound` of the two channels.
    """

    def __init__(self, protocol: Protocol, bound: Optional[int] = None):
        self.protocol = protocol
        self.channels = sr_pair_channels(protocol)
        if bound is None:
            bound = max(
                growth_bound(protocol), growth_bound(protocol, reverse=True)
            )
        if bound < 0:
            raise ValueError(f"`bound` must be nonnegative, received {bound}")
        self.bound = bound
        self.overflowed = False

    def _lead(self, config: _Config, action: Action) -> Optional[_Config]:
        state, *balance = config
        i = self.channels.index(action.channel)
        if len(balance[i]) >= self.bound:
            self.overflowed = True
            return None
        balance[i] = balance[i] + (action.symbol,)
        return (state, balance[0], balance[1])

    def _closure(
        self, follower: Machine, configs: set[_Config]
    ) -> frozenset[_Config]:
        found = set(configs)
        stack = list(configs)
        while stack:
            state, *balance = stack.pop()
            for t in follower.outgoing(state):
                i = self.channels.index(t.action.channel)
                if balance[i][:1] != (t.action.symbol,):
                    continue
                rest = list(balance)
                rest[i] = rest[i][1:]
                moved = (t.target, rest[0], rest[1])
                if moved not in found:
                    found.add(moved)
                    stack.append(moved)
        return frozenset(found)

    def includes(self, outer: int, inner: int) -> Inclusion:
        """Whether the projections of machine `inner` are among `outer`'s.

        Args:
            outer: Index of the following machine.
            inner: Index of the leading machine.
        """
        self.overflowed = False
        leader = self.protocol.machine(self.protocol.nodes[inner])
        follower = self.protocol.machine(self.protocol.nodes[outer])
        done = (follower.initial, (), ())
        start = (leader.initial, self._closure(follower, {done}))
        projections = {start: ((), ())}
        queue = collections.deque([start])
        while queue:
            current = queue.popleft()
            state, configs = current
            if state == leader.initial and done not in configs:
                holds = None if self.overflowed else False
                return Inclusion(holds, projections[current])
            for t in leader.outgoing(state):
                moved = set()
                for config in configs:
                    advanced = self._lead(config, t.action)
                    if advanced is not None:
                        moved.add(advanced)
                following = (t.target, self._closure(follower, moved))
                if following not in projections:
                    words = list(projections[current])
                    i = self.channels.index(t.action.channel)
                    words[i] = words[i] + (t.action.symbol,)
                    projections[following] = (words[0], words[1])
                    queue.append(following)
        return Inclusion(True)

    def affine(self) -> Inclusion:
        """Both inclusions; a refuted one takes precedence over an unknown."""
        both = [self.includes(1, 0), self.includes(0, 1)]
        for holds in (False, None):
            for found in both:
                if found.holds is holds:
                    return found
        return Inclusion(True)


@cfsm_verify_export("cfsm_verify.sr.AffinityReport")
@dataclasses.dataclass(frozen=True)
class AffinityReport:
    """The combined verdicts on a pair of send/receive machines.

    Each verdict is `True`, `False` or `None` for undetermined.

    Attributes:
        affine: Whether both machines have the same cycle projections.
        deadlock_free: Whether no deadlocked state is reachable.
        bounded: Whether the channel lengths are bounded.
        rationale: How the verdicts were reached.
        witness: A reachable state that decides a negative verdict: a
            deadlock, or a state past the growth threshold.
    """

    affine: Optional[bool]
    deadlock_free: Optional[bool]
    bounded: Optional[bool]
    rationale: str
    witness: Optional[GlobalState] = None


def _past_threshold(
    sg: StateGraph, thresholds: dict[types.ChannelId, int]
) -> Optional[GlobalState]:
    limits = [thresholds[c] for c in sg.protocol.channel_names]
    for state in sg.states:
        for c in (0, 1):
            other = state.contents[1 - c]
            if not other and len(state.contents[c]) >= limits[c]:
                return state
    return None


def _without_send_cycles(
    protocol: Protocol, budget: Budget
) -> AffinityReport:
    alpha, beta = sr_pair_channels(protocol)
    thresholds = {
        alpha: growth_bound(protocol),
        beta: growth_bound(protocol, reverse=True),
    }
    cap = max(thresholds.values())
    capped = dataclasses.replace(
        budget, max_channel_len=cap, max_total_len=None
    )
    sg = reach(protocol, capped)
    found = deadlocks(sg).value
    deadlock = found[0] if found else None
    witness = _past_threshold(sg, thresholds)
    cut_by_length = not sg.exhausted and len(sg) < capped.max_states
    if witness is not None or cut_by_length:
        # A longer channel implies a reachable state past the threshold
        # with the other channel empty.
        return AffinityReport(
            affine=False,
            deadlock_free=False if found else None,
            bounded=None,
            rationale=(
                f"no send cycles, but {alpha} reaches {thresholds[alpha]} "
                f"symbols or {beta} reaches {thresholds[beta]} while the "
                "other channel is empty, so the machines are not affine"
            ),
            witness=deadlock or witness,
        )
    if not sg.exhausted:
        return AffinityReport(
            affine=None,
            deadlock_free=False if found else None,
            bounded=None,
            rationale=(
                f"no send cycles; exploration stopped at {len(sg)} states "
                "before the growth threshold was settled"
            ),
            witness=deadlock,
        )
    balance = BalanceAutomaton(protocol, cap).affine()
    longest = max(s.total_length for s in sg.states)
    parts = [
        f"no send cycles; {len(sg)} states explored below the growth "
        f"thresholds, total channel length at most {longest}"
    ]
    if balance.holds is False:
        parts.append(
            f"projection pair {balance.witness} is produced by one machine "
            "only"
        )
    elif balance.holds is None:
        parts.append("affinity needs a balance beyond the growth threshold")
    return AffinityReport(
        affine=balance.holds,
        deadlock_free=not found,
        bounded=True,
        rationale="; ".join(parts),
        witness=deadlock,
    )


def _with_send_cycles(
    protocol: Protocol, budget: Budget, cycles: list[str]
) -> AffinityReport:
    sg = reach(protocol, budget)
    found = deadlocks(sg).value
    prefix = f"send cycles in {', '.join(cycles)}"
    if found:
        return AffinityReport(
            affine=None,
            deadlock_free=False,
            bounded=True if sg.exhausted else None,
            rationale=f"{prefix}; a deadlock is reachable",
            witness=found[0],
        )
    if sg.exhausted:
        # Affine deadlock-free pairs with a send cycle are unbounded.
        return AffinityReport(
            affine=False,
            deadlock_free=True,
            bounded=True,
            rationale=(
                f"{prefix}, yet the {len(sg)} reachable states are "
                "deadlock-free with bounded channels, so the machines are "
                "not affine"
            ),
        )
    return AffinityReport(
        affine=None,
        deadlock_free=None,
        bounded=None,
        rationale=(
            f"{prefix}; if the machines are affine the protocol has a "
            "deadlock or unbounded channels"
        ),
    )


@cfsm_verify_export("cfsm_verify.sr.decide_affine_deadlock")
def decide_affine_deadlock(
    protocol: Protocol, budget: Optional[Budget] = None
) -> AffinityReport:
    """Decides affinity and deadlock-freedom where that is possible.

    Without send cycles, the state space is explored with every channel
    capped at its growth threshold. Exceeding it refutes affinity; staying
    below it bounds the space, so deadlock-freedom is decided exactly and
    affinity is decided by a `BalanceAutomaton`. With a send cycle, an
    affine pair is either not deadlock-free or unbounded; the budgeted
    exploration settles what it can.

    Args:
        protocol: A pair of send/receive machines.
        budget: Caps on the exploration; defaults to `Budget.default()`.
            Without send cycles only `max_states` is used.

    Raises:
        ValueError: if `protocol` is not a pair of send/receive machines.
    """
    sr_pair_channels(protocol)
    budget = budget or Budget.default()
    cycles = [
        f"node {m.node}" for m in protocol.machines if send_cycles(m)
    ]
    if cycles:
        report = _with_send_cycles(protocol, budget, cycles)
    else:
        report = _without_send_cycles(protocol, budget)
    logging.info(
        "Pair %s: affine=%s deadlock_free=%s bounded=%s",
        protocol.name,
        report.affine,
        report.deadlock_free,
        report.bounded,
    )
    return report
