"""DO NOT EDIT.

This file was autogenerated. Do not edit it by hand,
since your modifications would be overwritten.
"""

from cfsm_verify.src.lang.dfa import Dfa as Dfa
from cfsm_verify.src.lang.dfa import union_from_states as union_from_states
from cfsm_verify.src.lang.nfa import compile_regex as compile_regex
from cfsm_verify.src.lang.nfa import parse_language as parse_language
from cfsm_verify.src.lang.recrel import RecRel as RecRel
from cfsm_verify.src.lang.recrel import parse_relation as parse_relation
from cfsm_verify.src.lang.recrel import rel_minus_quotient as rel_minus_quotient
from cfsm_verify.src.lang.recrel import relation_to_text as relation_to_text
from cfsm_verify.src.lang.regex import Alt as Alt
from cfsm_verify.src.lang.regex import Concat as Concat
from cfsm_verify.src.lang.regex import EmptySet as EmptySet
from cfsm_verify.src.lang.regex import Epsilon as Epsilon
from cfsm_verify.src.lang.regex import Star as Star
from cfsm_verify.src.lang.regex import Sym as Sym
from cfsm_verify.src.lang.regex import parse_regex as parse_regex
from cfsm_verify.src.lang.regex import to_regex as to_regex
from cfsm_verify.src.lang.regex import to_text as to_text
