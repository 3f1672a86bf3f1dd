"""DO NOT EDIT.

This file was autogenerated. Do not edit it by hand,
since your modifications would be overwritten.
"""

from cfsm_verify.src.explore.dot import machine_to_dot as machine_to_dot
from cfsm_verify.src.explore.dot import state_graph_to_dot as state_graph_to_dot
from cfsm_verify.src.explore.properties import ChannelStatus as ChannelStatus
from cfsm_verify.src.explore.properties import Result as Result
from cfsm_verify.src.explore.properties import Verdict as Verdict
from cfsm_verify.src.explore.properties import blocked_channels as blocked_channels
from cfsm_verify.src.explore.properties import bounded_channels as bounded_channels
from cfsm_verify.src.explore.properties import deadlocks as deadlocks
from cfsm_verify.src.explore.properties import executable_receptions as executable_receptions
from cfsm_verify.src.explore.properties import globally_blocked as globally_blocked
from cfsm_verify.src.explore.properties import half_duplex as half_duplex
from cfsm_verify.src.explore.properties import reachable_contents as reachable_contents
from cfsm_verify.src.explore.properties import stable_states as stable_states
from cfsm_verify.src.explore.properties import well_formed as well_formed
from cfsm_verify.src.explore.state_space import Budget as Budget
from cfsm_verify.src.explore.state_space import Edge as Edge
from cfsm_verify.src.explore.state_space import GlobalState as GlobalState
from cfsm_verify.src.explore.state_space import StateGraph as StateGraph
from cfsm_verify.src.explore.state_space import initial_state as initial_state
from cfsm_verify.src.explore.state_space import reach as reach
from cfsm_verify.src.explore.state_space import replay as replay
from cfsm_verify.src.explore.state_space import successors as successors
