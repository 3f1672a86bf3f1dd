import io
import json

from absl.testing import parameterized

from cfsm_verify.src import testing
from cfsm_verify.src.cli import main
from cfsm_verify.src.explore import dot
from cfsm_verify.src.gen.fixtures import FLOWCTL2_PROOF
from cfsm_verify.src.gen.fixtures import fixture
from cfsm_verify.src.model.protocol_file import load_protocol
from cfsm_verify.src.proofs.proof_file import load_proof

ONE_ROUND = """\
protocol one-round
node 0
node 1
channel alpha from 0 to 1
channel beta from 1 to 0
alphabet alpha d
alphabet beta b
machine 0 start h0
trans 0 h0 -d@alpha p0
trans 0 p0 +b@beta h0
machine 1 start h1
trans 1 h1 +d@alpha q1
trans 1 q1 -b@beta h1
"""

# Node 1 answers every `d` twice.
TWO_ACKS = ONE_ROUND.replace("one-round", "two-acks").replace(
    "trans 1 q1 -b@beta h1", "trans 1 q1 -b@beta r1\ntrans 1 r1 -b@beta h1"
)

HALTING_TAG = "tag\nprod a b b\nprod b a\nstart a a a\n"


class MainTest(testing.TestCase, parameterized.TestCase):
    def run_main(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        code = main.main(list(argv), out=out, err=err)
        self.stderr = err.getvalue()
        return code, out.getvalue()

    def protocol_file(self, text):
        return self.create_tempfile(content=text).full_path

    def test_validate(self):
        code, out = self.run_main("validate", "--fixture", "flowctl2")
        self.assertEqual(code, main.HOLDS)
        self.assertIn("sr_pair: yes", out)
        self.assertIn("verdict: holds (well formed)", out)

    def test_validate_reports_diagnostics(self):
        path = self.protocol_file(
            ONE_ROUND.replace("alphabet beta b", "alphabet beta b d")
        )
        code, out = self.run_main("validate", "--protocol", path)
        self.assertEqual(code, main.REFUTED)
        self.assertIn("diagnostic: alphabet-overlap", out)

    def test_deadlock_free(self):
        code, out = self.run_main("check", "deadlock", "--fixture", "flowctl2")
        self.assertEqual(code, main.HOLDS)
        self.assertIn("definitive, 59 states", out)

    def test_deadlock_found(self):
        code, out = self.run_main("check", "deadlock", "--fixture", "tag-demo")
        self.assertEqual(code, main.REFUTED)
        self.assertIn("witness: ", out)
        self.assertIn("step: node 1 -a_b@beta", out)

    def test_flow(self):
        code, out = self.run_main(
            "check",
            "deadlock",
            "--fixture",
            "flowctl2",
            "--flow",
            "cyclic:alpha",
        )
        self.assertEqual(code, main.HOLDS)
        self.assertIn("flow: cyclic:alpha", out)

    @parameterized.named_parameters(
        ("stable", ["stable", "00,14"], main.HOLDS),
        ("not_stable", ["stable", "03,13"], main.REFUTED),
        ("arrives", ["arrival", "03", "D_b@beta"], main.HOLDS),
        ("never_arrives", ["arrival", "02", "D_b@beta"], main.REFUTED),
        ("half_duplex", ["half-duplex"], main.REFUTED),
        ("bounded", ["bounded"], main.HOLDS),
    )
    def test_flowctl2_properties(self, argv, expected):
        code, _ = self.run_main("check", *argv, "--fixture", "flowctl2")
        self.assertEqual(code, expected)

    def test_budget_leaves_unknown(self):
        code, out = self.run_main(
            "check", "bounded", "--fixture", "counter", "--max-channel", "3"
        )
        self.assertEqual(code, main.UNKNOWN)
        self.assertIn("exhausted: no", out)

    @parameterized.named_parameters(
        ("missing_argument", ["check", "stable", "--fixture", "flowctl2"]),
        ("bad_state", ["check", "stable", "03,99", "--fixture", "flowctl2"]),
        (
            "flow_with_arrival",
            [
                "check",
                "arrival",
                "02",
                "D_b@beta",
                "--fixture",
                "flowctl2",
                "--flow",
                "cyclic:alpha",
            ],
        ),
        ("no_protocol", ["validate"]),
        ("missing_file", ["validate", "--protocol", "/nonexistent/p.txt"]),
        ("threads", ["validate", "--fixture", "access", "--threads", "0"]),
        ("no_proof", ["proof", "check", "--fixture", "counter"]),
        ("full_table", ["proof", "extend", "--fixture", "flowctl2"]),
        (
            "affine_variant",
            ["gen", "affine", "sideways", "--fixture", "access"],
        ),
    )
    def test_input_errors(self, argv):
        code, _ = self.run_main(*argv)
        self.assertEqual(code, main.INPUT_ERROR)
        self.assertStartsWith(self.stderr, "error: ")

    @parameterized.parameters("flowctl2", "altbit-turns")
    def test_proof_check(self, name):
        code, out = self.run_main(
            "proof", "check", "--fixture", name, "--threads", "2"
        )
        self.assertEqual(code, main.HOLDS)
        self.assertIn("violations: 0", out)
        self.assertIn("deadlock_free: yes", out)

    def test_proof_check_refuted(self):
        proof = self.protocol_file(
            FLOWCTL2_PROOF.replace("R 00,13 =", "R 00,11 =")
        )
        code, out = self.run_main(
            "proof", "check", "--fixture", "flowctl2", "--proof", proof
        )
        self.assertEqual(code, main.REFUTED)
        self.assertIn("violation: ", out)

    def test_proof_extend(self):
        path = self.create_tempfile().full_path
        code, out = self.run_main(
            "proof", "extend", "--fixture", "altbit-demons", "--out", path
        )
        self.assertEqual(code, main.HOLDS)
        self.assertIn(f"out: {path}", out)
        table = load_proof(path, fixture("altbit-demons").protocol)
        self.assertFalse(table.is_partial)

    def test_sr_affine(self):
        path = self.protocol_file(ONE_ROUND)
        code, out = self.run_main(
            "sr", "affine", "--protocol", path, "--sample", "4"
        )
        self.assertEqual(code, main.HOLDS)
        self.assertIn("deadlock_free: yes", out)
        self.assertIn("sample_equal: yes", out)

    def test_sr_not_affine(self):
        path = self.protocol_file(TWO_ACKS)
        code, out = self.run_main(
            "sr", "affine", "--protocol", path, "--sample", "4"
        )
        self.assertEqual(code, main.REFUTED)
        self.assertIn("sample_equal: no", out)

    def test_gen_tag(self):
        path = self.protocol_file(HALTING_TAG)
        code, out = self.run_main("gen", "tag", path)
        self.assertEqual(code, main.HOLDS)
        self.assertStartsWith(out, "protocol tag\n")

    def test_gen_fixture(self):
        protocol_path = self.create_tempfile().full_path
        proof_path = self.create_tempfile().full_path
        code, _ = self.run_main(
            "gen",
            "fixture",
            "flowctl2",
            "--out",
            protocol_path,
            "--proof-out",
            proof_path,
        )
        self.assertEqual(code, main.HOLDS)
        self.assertEqual(load_protocol(protocol_path).name, "flowctl2")
        with open(proof_path, encoding="utf-8") as f:
            self.assertEqual(f.read(), FLOWCTL2_PROOF)

    def test_gen_affine(self):
        path = self.protocol_file(ONE_ROUND)
        code, out = self.run_main(
            "gen", "affine", "deadlock", "--protocol", path
        )
        self.assertEqual(code, main.HOLDS)
        self.assertStartsWith(out, "protocol one-round-affine\n")

    def test_jsonl(self):
        code, out = self.run_main(
            "validate", "--fixture", "access", "--format", "jsonl"
        )
        self.assertEqual(code, main.HOLDS)
        records = [json.loads(line) for line in out.splitlines()]
        self.assertEqual(records[0], {"key": "protocol", "value": "access"})
        self.assertEqual(
            records[-1]["value"],
            {"verdict": "holds", "detail": "well formed"},
        )

    def test_identical_runs(self):
        argv = ["check", "half-duplex", "--fixture", "flowctl2"]
        self.assertEqual(self.run_main(*argv), self.run_main(*argv))

    def test_dot(self):
        if dot.pydot is None:
            self.skipTest("pydot is not installed")
        code, out = self.run_main("dot", "--fixture", "access", "--node", "0")
        self.assertEqual(code, main.HOLDS)
        self.assertIn("digraph", out)
        path = self.create_tempfile().full_path
        code, out = self.run_main(
            "explore", "--fixture", "flowctl2", "--dot", path
        )
        self.assertEqual(code, main.HOLDS)
        self.assertIn("states: 59", out)
