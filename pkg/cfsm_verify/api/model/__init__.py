"""DO NOT EDIT.

This file was autogenerated. Do not edit it by hand,
since your modifications would be overwritten.
"""

from cfsm_verify.src.model.protocol import Action as Action
from cfsm_verify.src.model.protocol import Channel as Channel
from cfsm_verify.src.model.protocol import Machine as Machine
from cfsm_verify.src.model.protocol import Protocol as Protocol
from cfsm_verify.src.model.protocol import Transition as Transition
from cfsm_verify.src.model.protocol_file import format_protocol as format_protocol
from cfsm_verify.src.model.protocol_file import load_protocol as load_protocol
from cfsm_verify.src.model.protocol_file import parse_protocol as parse_protocol
from cfsm_verify.src.model.validation import Classification as Classification
from cfsm_verify.src.model.validation import Diagnostic as Diagnostic
from cfsm_verify.src.model.validation import SrReport as SrReport
from cfsm_verify.src.model.validation import classify as classify
from cfsm_verify.src.model.validation import sr_checks as sr_checks
from cfsm_verify.src.model.validation import validate as validate
