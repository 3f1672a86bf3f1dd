"""DO NOT EDIT.

This file was autogenerated. Do not edit it by hand,
since your modifications would be overwritten.
"""

from cfsm_verify.src.config import color_enabled as color_enabled
from cfsm_verify.src.config import default_budget as default_budget
from cfsm_verify.src.config import max_relation_vectors as max_relation_vectors
from cfsm_verify.src.config import set_default_budget as set_default_budget
from cfsm_verify.src.config import set_max_relation_vectors as set_max_relation_vectors
