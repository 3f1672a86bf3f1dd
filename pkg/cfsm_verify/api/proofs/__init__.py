"""DO NOT EDIT.

This file was autogenerated. Do not edit it by hand,
since your modifications would be overwritten.
"""

from cfsm_verify.src.proofs.deadlock import DeadlockProof as DeadlockProof
from cfsm_verify.src.proofs.deadlock import prove_deadlock_free as prove_deadlock_free
from cfsm_verify.src.proofs.proof_file import load_proof as load_proof
from cfsm_verify.src.proofs.proof_file import parse_proof as parse_proof
from cfsm_verify.src.proofs.proof_file import write_proof as write_proof
from cfsm_verify.src.proofs.recognizable import check_recognizable_consistency as check_recognizable_consistency
from cfsm_verify.src.proofs.recognizable import extend_feedback as extend_feedback
from cfsm_verify.src.proofs.recognizable import extend_recognizable as extend_recognizable
from cfsm_verify.src.proofs.recognizable import product_graph as product_graph
from cfsm_verify.src.proofs.recognizable import prove_no_arrival as prove_no_arrival
from cfsm_verify.src.proofs.recognizable import prove_unreachable as prove_unreachable
from cfsm_verify.src.proofs.regular import check_regular_consistency as check_regular_consistency
from cfsm_verify.src.proofs.regular import extend_regular as extend_regular
from cfsm_verify.src.proofs.regular import h_graph as h_graph
from cfsm_verify.src.proofs.regular import prove_not_stable as prove_not_stable
from cfsm_verify.src.proofs.tables import Certificate as Certificate
from cfsm_verify.src.proofs.tables import Consistency as Consistency
from cfsm_verify.src.proofs.tables import Extension as Extension
from cfsm_verify.src.proofs.tables import RecognizableTable as RecognizableTable
from cfsm_verify.src.proofs.tables import RegularTable as RegularTable
from cfsm_verify.src.proofs.tables import Restriction as Restriction
from cfsm_verify.src.proofs.tables import Violation as Violation
