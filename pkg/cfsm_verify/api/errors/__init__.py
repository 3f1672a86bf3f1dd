"""DO NOT EDIT.

This file was autogenerated. Do not edit it by hand,
since your modifications would be overwritten.
"""

from cfsm_verify.src.errors import AlphabetMismatchError as AlphabetMismatchError
from cfsm_verify.src.errors import ChannelMismatchError as ChannelMismatchError
from cfsm_verify.src.errors import HypothesisError as HypothesisError
from cfsm_verify.src.errors import ParseError as ParseError
from cfsm_verify.src.errors import ProofFormatError as ProofFormatError
from cfsm_verify.src.errors import ProtocolFormatError as ProtocolFormatError
from cfsm_verify.src.errors import RegexSyntaxError as RegexSyntaxError
from cfsm_verify.src.errors import RelationTooLargeError as RelationTooLargeError
from cfsm_verify.src.errors import TagFormatError as TagFormatError
