"""Deadlock-freedom proofs from full proof tables."""

import dataclasses
import itertools
from typing import Optional
from typing import Union

from cfsm_verify.src import types
from cfsm_verify.src.api_export import cfsm_verify_export
from cfsm_verify.src.explore.state_space import GlobalState
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.proofs import recognizable
from cfsm_verify.src.proofs import regular
from cfsm_verify.src.proofs.tables import Certificate
from cfsm_verify.src.proofs.tables import Consistency
from cfsm_verify.src.proofs.tables import RecognizableTable
from cfsm_verify.src.proofs.tables import RegularTable


@cfsm_verify_export("cfsm_verify.proofs.DeadlockProof")
@dataclasses.dataclass(frozen=True)
class DeadlockProof:
    """Whether a full table proves a protocol deadlock-free.

    Attributes:
        deadlock_free: `True` if proven; `False` only means the table does
            not prove it.
        consistency: The consistency check of the table.
        certificates: One per composite state of receive states only.
    """

    deadlock_free: bool
    consistency: Consistency
    certificates: tuple[Certificate, ...] = ()

    @property
    def gaps(self) -> tuple[Certificate, ...]:
        return tuple(c for c in self.certificates if not c.certified)


def receive_composites(protocol: Protocol) -> list[types.CompositeState]:
    """Composite states in which every node is in a receive state."""
    return list(
        itertools.product(
            *(protocol.machine(n).receive_states for n in protocol.nodes)
        )
    )


@cfsm_verify_export("cfsm_verify.proofs.prove_deadlock_free")
def prove_deadlock_free(
    protocol: Protocol,
    table: Union[RegularTable, RecognizableTable],
    threads: int = 1,
    consistency: Optional[Consistency] = None,
) -> DeadlockProof:
    """Checks a full table and proves every deadlock unreachable with it.

    A deadlock has every node in a receive state and all channels empty.
    With a regular table, each such composite state must be shown not to
    be stable; with a recognizable table, each such global state must be
    shown unreachable.

    Args:
        protocol: The protocol.
        table: A full table for `protocol`.
        threads: Worker threads for the consistency check.
        consistency: A consistency check of `table` already done by the
            caller; the table is checked here only if this is `None`.

    Raises:
        HypothesisError: if the table does not contain the initial state,
            or a regular table is used on a protocol that is not cyclic.
        ValueError: if the table is partial or lacks an entry.
    """
    if isinstance(table, RegularTable):
        if consistency is None:
            consistency = regular.check_regular_consistency(
                protocol, table.channel, table, threads
            )

        def certify(composite: types.CompositeState) -> Certificate:
            return regular.prove_not_stable(
                protocol, table.channel, table, composite
            )

    else:
        if consistency is None:
            consistency = recognizable.check_recognizable_consistency(
                protocol, table, threads=threads
            )
        empty = ((),) * len(protocol.channels)

        def certify(composite: types.CompositeState) -> Certificate:
            return recognizable.prove_unreachable(
                protocol, table, GlobalState(composite, empty)
            )

    if not consistency.ok:
        return DeadlockProof(False, consistency)
    certificates = tuple(certify(s) for s in receive_composites(protocol))
    return DeadlockProof(
        all(c.certified for c in certificates), consistency, certificates
    )
