"""DO NOT EDIT.

This file was autogenerated. Do not edit it by hand,
since your modifications would be overwritten.
"""

from cfsm_verify.src.flowctl.schedulers import PriorityScheme as PriorityScheme
from cfsm_verify.src.flowctl.schedulers import cyclic_filter as cyclic_filter
from cfsm_verify.src.flowctl.schedulers import explore_schedule as explore_schedule
from cfsm_verify.src.flowctl.schedulers import frequently_empty as frequently_empty
from cfsm_verify.src.flowctl.schedulers import parse_scheme as parse_scheme
from cfsm_verify.src.flowctl.schedulers import scheduled_reach as scheduled_reach
from cfsm_verify.src.flowctl.smooth import Boundary as Boundary
from cfsm_verify.src.flowctl.smooth import SmoothCheck as SmoothCheck
from cfsm_verify.src.flowctl.smooth import boundary as boundary
from cfsm_verify.src.flowctl.smooth import check_smooth as check_smooth
from cfsm_verify.src.flowctl.smooth import cyclic_smooth_set as cyclic_smooth_set
from cfsm_verify.src.flowctl.smooth import ring_order as ring_order
from cfsm_verify.src.flowctl.smooth import smooth_schedule as smooth_schedule
