from cfsm_verify.src.testing.test_case import TestCase
