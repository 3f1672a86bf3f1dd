"""DO NOT EDIT.

This file was autogenerated. Do not edit it by hand,
since your modifications would be overwritten.
"""

from cfsm_verify.api import config
from cfsm_verify.api import errors
from cfsm_verify.api import explore
from cfsm_verify.api import flowctl
from cfsm_verify.api import gen
from cfsm_verify.api import lang
from cfsm_verify.api import model
from cfsm_verify.api import proofs
from cfsm_verify.api import sr
from cfsm_verify.src.version import __version__
from cfsm_verify.src.version import version
