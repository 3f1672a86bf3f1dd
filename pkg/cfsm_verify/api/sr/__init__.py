"""DO NOT EDIT.

This file was autogenerated. Do not edit it by hand,
since your modifications would be overwritten.
"""

from cfsm_verify.src.sr.affinity import AffinityReport as AffinityReport
from cfsm_verify.src.sr.affinity import BalanceAutomaton as BalanceAutomaton
from cfsm_verify.src.sr.affinity import Inclusion as Inclusion
from cfsm_verify.src.sr.affinity import decide_affine_deadlock as decide_affine_deadlock
from cfsm_verify.src.sr.affinity import growth_bound as growth_bound
from cfsm_verify.src.sr.projection import Projection as Projection
from cfsm_verify.src.sr.projection import cycle_projections as cycle_projections
from cfsm_verify.src.sr.projection import project as project
from cfsm_verify.src.sr.projection import receive_cycles as receive_cycles
from cfsm_verify.src.sr.projection import send_cycles as send_cycles
