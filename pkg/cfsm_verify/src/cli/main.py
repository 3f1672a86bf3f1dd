"""The `cfsm-verify` command line.

Every command prints a report, one record per line, as `key: value` text
or as JSON lines (`--format jsonl`), and exits with

- `0` when the property holds or the proof is accepted,
- `1` when it is refuted; the report shows the witness,
- `2` when the budget ran out before an answer,
- `3` on an input error, with a one-line message on stderr.
"""

import argparse
import json
import sys
from typing import Any, Callable, Optional, Sequence, TextIO

from absl import logging

from cfsm_verify.src import config
from cfsm_verify.src import types
from cfsm_verify.src.explore import dot
from cfsm_verify.src.explore import properties
from cfsm_verify.src.explore.state_space import Budget
from cfsm_verify.src.explore.state_space import GlobalState
from cfsm_verify.src.explore.state_space import StateGraph
from cfsm_verify.src.explore.state_space import reach
from cfsm_verify.src.flowctl.schedulers import parse_scheme
from cfsm_verify.src.flowctl.schedulers import scheduled_reach
from cfsm_verify.src.gen import affinize
from cfsm_verify.src.gen import fixtures
from cfsm_verify.src.gen import tags
from cfsm_verify.src.model.protocol import Action
from cfsm_verify.src.model.protocol import Protocol
from cfsm_verify.src.model.protocol_file import format_protocol
from cfsm_verify.src.model.protocol_file import load_protocol
from cfsm_verify.src.model.validation import classify
from cfsm_verify.src.model.validation import validate
from cfsm_verify.src.proofs import deadlock
from cfsm_verify.src.proofs import recognizable
from cfsm_verify.src.proofs import regular
from cfsm_verify.src.proofs.proof_file import load_proof
from cfsm_verify.src.proofs.proof_file import parse_proof
from cfsm_verify.src.proofs.proof_file import write_proof
from cfsm_verify.src.proofs.tables import Consistency
from cfsm_verify.src.proofs.tables import Extension
from cfsm_verify.src.proofs.tables import RegularTable
from cfsm_verify.src.sr.affinity import decide_affine_deadlock
from cfsm_verify.src.sr.projection import cycle_projections
from cfsm_verify.src.version import __version__

HOLDS = 0
REFUTED = 1
UNKNOWN = 2
INPUT_ERROR = 3

_VERDICTS = {HOLDS: "holds", REFUTED: "refuted", UNKNOWN: "unknown"}
_COLORS = {HOLDS: "32", REFUTED: "31", UNKNOWN: "33"}

# Properties that only look at states with empty channels, which every
# flow-control schedule preserves.
_FLOW_PROPERTIES = ("deadlock", "stable")

# Violations printed before the report is cut short.
_MAX_VIOLATIONS = 20


class Report:
    """Collects `key: value` records and prints them in one format."""

    def __init__(self, output_format: str, out: TextIO) -> None:
        self.output_format = output_format
        self.out = out

    def record(self, key: str, value: Any) -> None:
        if self.output_format == "jsonl":
            self.out.write(
                json.dumps({"key": key, "value": value}, sort_keys=True)
                + "\n"
            )
        else:
            self.out.write(f"{key}: {_text(value)}\n")

    def verdict(self, code: int, detail: str = "") -> int:
        word = _VERDICTS[code]
        if self.output_format == "jsonl":
            self.record("verdict", {"verdict": word, "detail": detail})
            return code
        if config.color_enabled() and self.out.isatty():
            word = f"\x1b[{_COLORS[code]}m{word}\x1b[0m"
        suffix = f" ({detail})" if detail else ""
        self.out.write(f"verdict: {word}{suffix}\n")
        return code


def _text(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return {True: "yes", False: "no", None: "unknown"}[value]
    if isinstance(value, (list, tuple)):
        return ", ".join(_text(v) for v in value) or "-"
    return str(value)


def _parse_composite(protocol: Protocol, text: str) -> types.CompositeState:
    composite = tuple(s.strip() for s in text.split(","))
    if len(composite) != len(protocol.nodes):
        raise ValueError(
            f"Composite state {text!r} needs one local state for each of "
            f"the nodes {list(protocol.nodes)}"
        )
    for node, state in zip(protocol.nodes, composite):
        if state not in protocol.machine(node).states:
            raise ValueError(f"Node {node} has no state {state!r}")
    return composite


def _budget(args: argparse.Namespace) -> Budget:
    default = Budget.default()
    return Budget(
        max_states=(
            default.max_states
            if args.max_states is None
            else args.max_states
        ),
        max_channel_len=(
            default.max_channel_len
            if args.max_channel is None
            else args.max_channel
        ),
        max_total_len=(
            default.max_total_len if args.max_total is None else args.max_total
        ),
    )


def _protocol(args: argparse.Namespace) -> Protocol:
    if args.fixture and args.protocol:
        raise ValueError("Pass a protocol file or `--fixture`, not both")
    if args.fixture:
        return fixtures.fixture(args.fixture).protocol
    if not args.protocol:
        raise ValueError("Pass a protocol file or `--fixture <name>`")
    return load_protocol(args.protocol)


def _explore(
    protocol: Protocol, args: argparse.Namespace, report: Report
) -> StateGraph:
    budget = _budget(args)
    if args.flow:
        scheme = parse_scheme(args.flow)
        report.record("flow", args.flow)
        sg = scheduled_reach(protocol, scheme, budget)
    else:
        sg = reach(protocol, budget)
    report.record("states", len(sg))
    report.record("edges", len(sg.edges))
    report.record("exhausted", sg.exhausted)
    return sg


def _trace(sg: StateGraph, state: GlobalState, report: Report) -> None:
    report.record("witness", state.format(sg.protocol))
    for edge in sg.path_to(sg.index[state]):
        report.record("step", f"node {edge.node} {edge.action}")


def _extent(sg: StateGraph) -> str:
    return f"{'definitive' if sg.exhausted else 'partial'}, {len(sg)} states"


def cmd_validate(args: argparse.Namespace, report: Report) -> int:
    protocol = _protocol(args)
    found = validate(protocol)
    report.record("protocol", protocol.name)
    for diagnostic in found:
        report.record("diagnostic", str(diagnostic))
    if found:
        return report.verdict(REFUTED, f"{len(found)} diagnostics")
    classification = classify(protocol)
    report.record("cyclic", classification.is_cyclic)
    report.record("sr_pair", classification.is_sr_pair)
    return report.verdict(HOLDS, "well formed")


def cmd_explore(args: argparse.Namespace, report: Report) -> int:
    protocol = _protocol(args)
    sg = _explore(protocol, args, report)
    report.record(
        "max_total_len", max(s.total_length for s in sg.states)
    )
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as f:
            f.write(dot.state_graph_to_dot(sg))
        report.record("dot", args.dot)
    if sg.exhausted:
        return report.verdict(HOLDS, _extent(sg))
    return report.verdict(UNKNOWN, _extent(sg))


def _check_deadlock(sg: StateGraph, report: Report) -> int:
    found = properties.deadlocks(sg)
    if found.value:
        _trace(sg, found.value[0], report)
        return report.verdict(REFUTED, f"deadlock, {_extent(sg)}")
    if found.definitive:
        return report.verdict(HOLDS, _extent(sg))
    return report.verdict(UNKNOWN, _extent(sg))


def _check_stable(sg: StateGraph, report: Report, target: str) -> int:
    composite = _parse_composite(sg.protocol, target)
    found = properties.stable_states(sg)
    if composite in found.value:
        empty = GlobalState(composite, ((),) * len(sg.protocol.channels))
        _trace(sg, empty, report)
        return report.verdict(HOLDS, f"stable, {_extent(sg)}")
    if found.definitive:
        return report.verdict(REFUTED, f"not stable, {_extent(sg)}")
    return report.verdict(UNKNOWN, _extent(sg))


def _check_arrival(
    sg: StateGraph, report: Report, state: str, symbol_at: str
) -> int:
    protocol = sg.protocol
    action = Action.parse(f"+{symbol_at}")
    head = protocol.channel(action.channel).head
    if state not in protocol.machine(head).states:
        raise ValueError(
            f"Node {head} (the head of {action.channel!r}) has no state "
            f"{state!r}"
        )
    found = properties.executable_receptions(sg)
    if (head, state, action.symbol) in found.value:
        return report.verdict(HOLDS, f"can arrive, {_extent(sg)}")
    if found.definitive:
        return report.verdict(REFUTED, f"never arrives, {_extent(sg)}")
    return report.verdict(UNKNOWN, _extent(sg))


def _check_verdict(
    sg: StateGraph, report: Report, verdict: properties.Verdict
) -> int:
    for witness in verdict.witnesses:
        if isinstance(witness, int):
            witness = sg.states[witness].format(sg.protocol)
        report.record("witness", _text(witness))
    if verdict.holds is None:
        return report.verdict(UNKNOWN, _extent(sg))
    return report.verdict(HOLDS if verdict.holds else REFUTED, _extent(sg))


def _check_bounded(sg: StateGraph, report: Report) -> int:
    found = properties.bounded_channels(sg)
    if found.value is None:
        return report.verdict(UNKNOWN, _extent(sg))
    report.record("max_total_len", found.value)
    return report.verdict(HOLDS, _extent(sg))


def cmd_check(args: argparse.Namespace, report: Report) -> int:
    protocol = _protocol(args)
    if args.flow and args.property not in _FLOW_PROPERTIES:
        raise ValueError(
            f"`--flow` keeps only states with empty channels; it does not "
            f"apply to `{args.property}`"
        )
    expected = {"stable": 1, "arrival": 2}.get(args.property, 0)
    if len(args.args) != expected:
        raise ValueError(
            f"`check {args.property}` takes {expected} arguments, "
            f"received {len(args.args)}"
        )
    sg = _explore(protocol, args, report)
    if args.property == "deadlock":
        return _check_deadlock(sg, report)
    if args.property == "stable":
        return _check_stable(sg, report, *args.args)
    if args.property == "arrival":
        return _check_arrival(sg, report, *args.args)
    if args.property == "half-duplex":
        return _check_verdict(sg, report, properties.half_duplex(sg))
    if args.property == "well-formed":
        return _check_verdict(sg, report, properties.well_formed(sg))
    return _check_bounded(sg, report)


def _load_table(protocol: Protocol, args: argparse.Namespace):
    if args.proof:
        return load_proof(args.proof, protocol)
    if args.fixture:
        text = fixtures.fixture(args.fixture).proof
        if text is not None:
            return parse_proof(text, protocol)
    raise ValueError("Pass a proof file with `--proof <file>`")


def _extend(protocol: Protocol, table, threads: int) -> Extension:
    if isinstance(table, RegularTable):
        return regular.extend_regular(
            protocol, table.channel, table, threads
        )
    if table.feedback is not None:
        return recognizable.extend_feedback(protocol, table, threads)
    return recognizable.extend_recognizable(protocol, table, threads)


def _consistency(protocol: Protocol, table, threads: int) -> Consistency:
    if isinstance(table, RegularTable):
        return regular.check_regular_consistency(
            protocol, table.channel, table, threads
        )
    return recognizable.check_recognizable_consistency(
        protocol, table, threads=threads
    )


def _violations(consistency: Consistency, report: Report) -> None:
    report.record("checked", consistency.checked)
    report.record("violations", len(consistency.violations))
    for violation in consistency.violations[:_MAX_VIOLATIONS]:
        report.record("violation", str(violation))


def cmd_proof(args: argparse.Namespace, report: Report) -> int:
    protocol = _protocol(args)
    table = _load_table(protocol, args)
    report.record("table", type(table).__name__)
    report.record("declared", len(table.entries))
    if args.action == "extend" or table.is_partial:
        if not table.is_partial:
            raise ValueError("The table is already full; use `proof check`")
        extension = _extend(protocol, table, args.threads)
        consistency = extension.consistency
        _violations(consistency, report)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as f:
                f.write(write_proof(extension.table, protocol))
            report.record("out", args.out)
        if not extension.extended:
            return report.verdict(REFUTED, "the table cannot be extended")
        table = extension.table
        if args.action == "extend":
            return report.verdict(HOLDS, "extended to a consistent table")
    else:
        consistency = _consistency(protocol, table, args.threads)
        _violations(consistency, report)
        if not consistency.ok:
            return report.verdict(REFUTED, "the table is not consistent")
    proof = deadlock.prove_deadlock_free(
        protocol, table, args.threads, consistency=consistency
    )
    report.record("deadlock_free", proof.deadlock_free)
    for gap in proof.gaps:
        report.record("gap", gap.reason)
    return report.verdict(HOLDS, "the table is consistent")


def cmd_sr(args: argparse.Namespace, report: Report) -> int:
    protocol = _protocol(args)
    found = decide_affine_deadlock(protocol, _budget(args))
    report.record("affine", found.affine)
    report.record("deadlock_free", found.deadlock_free)
    report.record("bounded", found.bounded)
    report.record("rationale", found.rationale)
    if found.witness is not None:
        report.record("witness", found.witness.format(protocol))
    if args.sample is not None:
        channels = protocol.channel_names
        first, second = (
            cycle_projections(m, channels, args.sample)
            for m in protocol.machines
        )
        report.record("sample_len", args.sample)
        report.record("sample_equal", first == second)
        only = sorted(first ^ second)
        if only:
            report.record("sample_witness", _text(only[0]))
    if found.affine is None:
        return report.verdict(UNKNOWN, "affinity undetermined")
    return report.verdict(HOLDS if found.affine else REFUTED)


def cmd_gen(args: argparse.Namespace, report: Report) -> int:
    """Writes a generated protocol to `--out` or to stdout."""
    proof_text = None
    if args.kind == "tag":
        with open(args.source, encoding="utf-8") as f:
            system = tags.parse_tag_system(f.read())
        protocol = tags.tag_to_protocol(system)
    elif args.kind == "fixture":
        item = fixtures.fixture(args.source)
        protocol, proof_text = item.protocol, item.proof
    else:
        build = {
            "deadlock": affinize.affinize_deadlock,
            "bounded": affinize.affinize_bounded,
        }.get(args.source)
        if build is None:
            raise ValueError(
                f"`gen affine` takes `deadlock` or `bounded`, received "
                f"{args.source!r}"
            )
        protocol = build(_protocol(args))
    text = format_protocol(protocol)
    if not args.out:
        report.out.write(text)
        return HOLDS
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(text)
    report.record("protocol", protocol.name)
    report.record("out", args.out)
    if proof_text is not None and args.proof_out:
        with open(args.proof_out, "w", encoding="utf-8") as f:
            f.write(proof_text)
        report.record("proof_out", args.proof_out)
    return report.verdict(HOLDS)


def cmd_dot(args: argparse.Namespace, report: Report) -> int:
    protocol = _protocol(args)
    nodes = [args.node] if args.node else list(protocol.nodes)
    text = "".join(dot.machine_to_dot(protocol.machine(n)) for n in nodes)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
        report.record("out", args.out)
        return report.verdict(HOLDS)
    sys.stdout.write(text)
    return HOLDS


def _common() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    source = parser.add_argument_group("protocol")
    source.add_argument("--protocol", help="A protocol file.")
    source.add_argument(
        "--fixture", choices=fixtures.fixture_names(), help="Built-in input."
    )
    parser.add_argument(
        "--format", choices=("text", "jsonl"), default="text"
    )
    budget = parser.add_argument_group("budget")
    budget.add_argument("--max-states", type=int, default=None)
    budget.add_argument("--max-channel", type=int, default=None)
    budget.add_argument("--max-total", type=int, default=None)
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="Worker threads for consistency checks.",
    )
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="cfsm-verify",
        description="Verify protocols of communicating finite state "
        "machines.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def command(
        name: str, handler: Callable[..., int], help_text: str
    ) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    command("validate", cmd_validate, "Check well-formedness.")

    sub = command("explore", cmd_explore, "Explore the global states.")
    sub.add_argument("--flow", help="cyclic:<ch>, smooth:<A;B>, chain:<n,..>")
    sub.add_argument("--dot", help="Write the state graph to this file.")

    sub = command("check", cmd_check, "Check one property.")
    sub.add_argument(
        "property",
        choices=(
            "deadlock",
            "stable",
            "arrival",
            "half-duplex",
            "bounded",
            "well-formed",
        ),
    )
    sub.add_argument(
        "args",
        nargs="*",
        help="`stable <S>` or `arrival <state> <sym>@<channel>`.",
    )
    sub.add_argument("--flow", help="cyclic:<ch>, smooth:<A;B>, chain:<n,..>")

    sub = command(
        "proof",
        cmd_proof,
        "Check or extend a proof table. The exit code reflects table "
        "consistency only; deadlock freedom is reported as `deadlock_free`.",
    )
    sub.add_argument("action", choices=("check", "extend"))
    sub.add_argument("--proof", help="A proof file.")
    sub.add_argument("--out", help="Write the extended table here.")

    sub = command("sr", cmd_sr, "Decide affinity of a send/receive pair.")
    sub.add_argument("analysis", choices=("affine",))
    sub.add_argument(
        "--sample",
        type=int,
        help="Also compare cycle projections up to this length.",
    )

    sub = command("gen", cmd_gen, "Generate a protocol file.")
    sub.add_argument("kind", choices=("tag", "fixture", "affine"))
    sub.add_argument(
        "source",
        help="A tag file, a fixture name, or `deadlock`/`bounded`.",
    )
    sub.add_argument("--out", help="Write the protocol here.")
    sub.add_argument("--proof-out", help="Write the fixture's proof here.")

    sub = command("dot", cmd_dot, "Draw the machines in DOT.")
    sub.add_argument("--node", help="Only this node's machine.")
    sub.add_argument("--out", help="Write DOT here.")
    return parser


def main(
    argv: Optional[Sequence[str]] = None,
    out: Optional[TextIO] = None,
    err: Optional[TextIO] = None,
) -> int:
    """Runs one command and returns its exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    if args.threads <= 0:
        err.write(f"error: `--threads` must be positive, got {args.threads}\n")
        return INPUT_ERROR
    logging.set_verbosity(logging.WARNING)
    report = Report(args.format, out)
    try:
        return args.handler(args, report)
    except (ValueError, OSError, ImportError) as e:
        err.write(f"error: {e}\n")
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
