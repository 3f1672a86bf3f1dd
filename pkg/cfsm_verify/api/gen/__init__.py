"""DO NOT EDIT.

This file was autogenerated. Do not edit it by hand,
since your modifications would be overwritten.
"""

from cfsm_verify.src.gen.affinize import affinize_bounded as affinize_bounded
from cfsm_verify.src.gen.affinize import affinize_deadlock as affinize_deadlock
from cfsm_verify.src.gen.fixtures import Fixture as Fixture
from cfsm_verify.src.gen.fixtures import fixture as fixture
from cfsm_verify.src.gen.fixtures import fixture_names as fixture_names
from cfsm_verify.src.gen.tags import TagRun as TagRun
from cfsm_verify.src.gen.tags import TagSystem as TagSystem
from cfsm_verify.src.gen.tags import format_tag_system as format_tag_system
from cfsm_verify.src.gen.tags import parse_tag_system as parse_tag_system
from cfsm_verify.src.gen.tags import tag_bounded as tag_bounded
from cfsm_verify.src.gen.tags import tag_run as tag_run
from cfsm_verify.src.gen.tags import tag_step as tag_step
from cfsm_verify.src.gen.tags import tag_to_protocol as tag_to_protocol
