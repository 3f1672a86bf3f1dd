from absl.testing import parameterized

from cfsm_verify.src import testing
from cfsm_verify.src.gen.fixtures import fixture
from cfsm_verify.src.lang.recrel import parse_relation
from cfsm_verify.src.proofs import deadlock
from cfsm_verify.src.proofs.proof_file import parse_proof
from cfsm_verify.src.proofs.tables import RecognizableTable


def flowctl2():
    item = fixture("flowctl2")
    return item.protocol, parse_proof(item.proof, item.protocol)


class DeadlockTest(testing.TestCase, parameterized.TestCase):
    def test_receive_composites(self):
        protocol, _ = flowctl2()
        self.assertEqual(
            deadlock.receive_composites(protocol), [("03", "13")]
        )
        altbit = fixture("altbit-turns").protocol
        self.assertEqual(
            deadlock.receive_composites(altbit), [("04", "14", "20", "30")]
        )

    def test_flowctl2(self):
        protocol, table = flowctl2()
        proof = deadlock.prove_deadlock_free(protocol, table)
        self.assertTrue(proof.deadlock_free)
        self.assertTrue(proof.consistency.ok)
        self.assertLen(proof.certificates, 1)
        self.assertEqual(proof.gaps, ())

    def test_table_admits_a_deadlock(self):
        protocol, table = flowctl2()
        entries = dict(table.entries)
        idle = parse_relation(
            "(eps, eps)", protocol.channel_names, protocol.channel_alphabets
        )
        entries[("03", "13")] = entries[("03", "13")].union(idle)
        loose = RecognizableTable(
            table.channels, table.alphabets, entries, default_empty=True
        )
        proof = deadlock.prove_deadlock_free(protocol, loose)
        # Both nodes only receive in (03,13), so the extra vector is inert.
        self.assertTrue(proof.consistency.ok)
        self.assertFalse(proof.deadlock_free)
        self.assertLen(proof.gaps, 1)
        self.assertEqual(proof.gaps[0].composite, ("03", "13"))

    def test_inconsistent_table(self):
        item = fixture("flowctl2")
        text = item.proof.replace("R 00,13 =", "R 00,11 =")
        table = parse_proof(text, item.protocol)
        proof = deadlock.prove_deadlock_free(item.protocol, table)
        self.assertFalse(proof.deadlock_free)
        self.assertFalse(proof.consistency.ok)
        self.assertEqual(proof.certificates, ())

    def test_known_consistency_is_not_recomputed(self):
        item = fixture("flowctl2")
        broken = parse_proof(
            item.proof.replace("R 00,13 =", "R 00,11 ="), item.protocol
        )
        failed = deadlock.prove_deadlock_free(item.protocol, broken)
        _, table = flowctl2()
        proof = deadlock.prove_deadlock_free(
            item.protocol, table, consistency=failed.consistency
        )
        self.assertIs(proof.consistency, failed.consistency)
        self.assertFalse(proof.deadlock_free)

        checked = deadlock.prove_deadlock_free(item.protocol, table)
        reused = deadlock.prove_deadlock_free(
            item.protocol, table, consistency=checked.consistency
        )
        self.assertIs(reused.consistency, checked.consistency)
        self.assertTrue(reused.deadlock_free)
