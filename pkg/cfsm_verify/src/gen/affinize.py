"""Rewriting a pair of send/receive machines into an affine pair.

Both constructions add a marker symbol `mark_<channel>` to each channel
and extra states, so that every home-to-home label sequence of either
machine projects to a sequence of blocks `(u_alpha mark_alpha, u_beta
mark_beta)` (one marker per channel per block for `affinize_deadlock`,
two for `affinize_bounded`). Both machines then have the same projection
relation, whatever the input pair does.

`affinize_deadlock` keeps deadlock-freedom: the new pair reaches a
deadlock iff the input pair does. `affinize_bounded` keeps the bounded
channel property instead: its new send loops are never reached.
"""

from typing import Callable, Iterable

from absl import logging

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.model.protocol import Action
from cfsm_verify.src.model.protocol import Machine
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.protocol import Transition
from cfsm_verify.src.model.protocol import receive
from cfsm_verify.src.model.protocol import send
from cfsm_verify.src.model.validation import sr_pair_channels


def marker(channel: types.ChannelId) -> types.Symbol:
    return f"mark_{channel}"


def _fresh(machine: Machine, names: Iterable[str]) -> None:
    taken = sorted(set(names) & set(machine.states))
    if taken:
        raise ValueError(
            f"Node {machine.node} already has states {taken}; rename them "
            "before rewriting the pair"
        )


def detach_home(machine: Machine) -> Machine:
    """Makes the initial state unreachable from every other state.

    A copy `<home>_p0` of the initial state takes over every transition
    that entered it, self-loops included. The copy has the outgoing
    transitions of the initial state. Deadlocks are unaffected.
    """
    home = machine.initial
    copy = f"{home}_p0"
    _fresh(machine, [copy])

    def retarget(state: types.StateName) -> types.StateName:
        return copy if state == home else state

    transitions = [
        Transition(t.source, t.action, retarget(t.target))
        for t in machine.transitions
    ]
    transitions.extend(
        Transition(copy, t.action, retarget(t.target))
        for t in machine.outgoing(home)
    )
    return Machine(machine.node, home, tuple(transitions), machine.states)


class _Rewrite:
    """The channels, alphabets and new transitions of one machine."""

    def __init__(
        self, protocol: Protocol, machine: Machine, suffixes: Iterable[str]
    ) -> None:
        alpha, beta = sr_pair_channels(protocol)
        node_is_first = machine.node == protocol.nodes[0]
        self.out, self.into = (alpha, beta) if node_is_first else (beta, alpha)
        self.sends = protocol.alphabet(self.out)
        self.receptions = protocol.alphabet(self.into)
        self.machine = detach_home(machine)
        self.names = {s: f"{machine.node}_{s}" for s in suffixes}
        _fresh(self.machine, self.names.values())
        self.transitions = list(self.machine.transitions)

    def state(self, suffix: str) -> types.StateName:
        return self.names[suffix]

    def add(self, source: str, action: Action, target: str) -> None:
        self.transitions.append(Transition(source, action, target))

    def send_mark(self) -> Action:
        return send(marker(self.out), self.out)

    def receive_mark(self) -> Action:
        return receive(marker(self.into), self.into)

    def complete(
        self, mark_send_to: str, mark_receive_to: str, missing_to: str
    ) -> None:
        """Adds the marker and missing-label transitions of old states."""
        machine = self.machine
        for p in machine.states:
            outgoing = machine.outgoing(p)
            if machine.is_send_state(p):
                self.add(p, self.send_mark(), mark_send_to)
                used = {t.action.symbol for t in outgoing}
                for b in self.sends:
                    if b not in used:
                        self.add(p, send(b, self.out), missing_to)
            else:
                self.add(p, self.receive_mark(), mark_receive_to)
                used = {t.action.symbol for t in outgoing}
                for b in self.receptions:
                    if b not in used:
                        self.add(p, receive(b, self.into), missing_to)

    def send_loop(self, state: str) -> None:
        for b in self.sends:
            self.add(state, send(b, self.out), state)

    def receive_loop(self, state: str) -> None:
        for b in self.receptions:
            self.add(state, receive(b, self.into), state)

    def result(self) -> Machine:
        return Machine(
            self.machine.node,
            self.machine.initial,
            tuple(self.transitions),
            self.machine.states + tuple(self.names.values()),
        )


def _deadlock_machine(protocol: Protocol, machine: Machine) -> Machine:
    rewrite = _Rewrite(protocol, machine, ["s", "s1", "r"])
    home = rewrite.machine.initial
    s, s1, r = rewrite.state("s"), rewrite.state("s1"), rewrite.state("r")
    rewrite.complete(mark_send_to=r, mark_receive_to=s, missing_to=s1)
    rewrite.add(s1, rewrite.send_mark(), r)
    rewrite.add(r, rewrite.receive_mark(), home)
    rewrite.add(s, rewrite.send_mark(), home)
    rewrite.send_loop(s1)
    rewrite.send_loop(s)
    rewrite.receive_loop(r)
    return rewrite.result()


def _bounded_machine(protocol: Protocol, machine: Machine) -> Machine:
    rewrite = _Rewrite(protocol, machine, ["r", "r1", "r2", "r3", "s", "s1"])
    home = rewrite.machine.initial
    r, r1, r2, r3 = (rewrite.state(k) for k in ("r", "r1", "r2", "r3"))
    s, s1 = rewrite.state("s"), rewrite.state("s1")
    rewrite.complete(mark_send_to=r2, mark_receive_to=r1, missing_to=r)
    rewrite.add(r, rewrite.receive_mark(), r1)
    rewrite.add(r1, rewrite.receive_mark(), s)
    rewrite.add(s, rewrite.send_mark(), s1)
    rewrite.add(r2, rewrite.receive_mark(), r3)
    rewrite.add(r3, rewrite.receive_mark(), s1)
    rewrite.add(s1, rewrite.send_mark(), home)
    rewrite.receive_loop(r)
    rewrite.receive_loop(r2)
    rewrite.send_loop(s)
    return rewrite.result()


def _rewrite_pair(
    protocol: Protocol,
    build: Callable[[Protocol, Machine], Machine],
    suffix: str,
) -> Protocol:
    alpha, beta = sr_pair_channels(protocol)
    for channel in (alpha, beta):
        if marker(channel) in protocol.alphabet(channel):
            raise ValueError(
                f"Channel {channel!r} already uses the symbol "
                f"{marker(channel)!r}"
            )
    machines = [build(protocol, m) for m in protocol.machines]
    logging.info(
        "Rewrote %s into an affine pair with %s states",
        protocol.name,
        "+".join(str(len(m.states)) for m in machines),
    )
    return protocol.replace_machines(
        machines,
        name=f"{protocol.name}-{suffix}",
        alphabets={
            channel: protocol.alphabet(channel) + (marker(channel),)
            for channel in (alpha, beta)
        },
    )


@cfsm_verify_export("cfsm_verify.gen.affinize_deadlock")
def affinize_deadlock(protocol: Protocol) -> Protocol:
    """An affine pair that deadlocks iff `protocol` does.

    Each machine gets send states `s`, `s1` and a receive state `r`. A
    send state may also send the marker (to `r`) or any symbol it lacks
    (to `s1`); a receive state may also receive the marker (to `s`) or
    any symbol it lacks (to `s1`). Then `s1` sends symbols and finally the
    marker to `r`, `r` receives symbols and finally the marker back home,
    and `s` sends symbols and finally the marker back home.

    A machine waiting in `r` with empty channels means its partner is in
    `s`, which sends; no new deadlock arises.

    Raises:
        ValueError: if `protocol` is not a pair of send/receive machines
            or already uses a marker symbol or state name.
    """
    return _rewrite_pair(protocol, _deadlock_machine, "affine")


@cfsm_verify_export("cfsm_verify.gen.affinize_bounded")
def affinize_bounded(protocol: Protocol) -> Protocol:
    """An affine pair with bounded channels iff `protocol` has them.

    Each machine gets receive states `r`, `r1`, `r2`, `r3` and send states
    `s`, `s1`. The marker leads a send state to `r2` and a receive state
    to `r1`; a lacking symbol leads either to `r`. Then `r` reaches `r1`,
    `r1` reaches `s`, `r2` reaches `r3` and `r3` reaches `s1`, each on a
    received marker; `s` sends the marker to `s1` and `s1` sends it home.
    `r` and `r2` receive any symbol and `s` sends any symbol in a loop.

    Both machines stop in `r1` or `r3` waiting for a second marker that
    never comes, so the loop at `s` is never entered and the new pair may
    deadlock even if the input pair does not.

    Raises:
        ValueError: if `protocol` is not a pair of send/receive machines
            or already uses a marker symbol or state name.
    """
    return _rewrite_pair(protocol, _bounded_machine, "affine-bounded")
