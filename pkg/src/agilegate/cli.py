"""Command-line interface.

Exit codes: 0 the command ran (whatever the verdict), 2 an input document is
invalid, 3 the catalog is invalid, 4 No-go when ``--gate-exit`` is given.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import __version__
from ._numbers import as_fraction, fmt4
from .catalog import Catalog, load_catalog, read_json, transitive_prerequisites
from .errors import AgileGateError, InputError, ParseError, ValidationError
from .gating import GatePolicy, Verdict, decide_go_nogo
from .pipeline import PipelineInputs, policies_from_dict, run_pipeline
from .readiness import (
    ReadinessPolicy,
    assess_readiness,
    build_adoption_plan,
    objectives_from_dict,
    select_candidates,
)
from .report import (
    candidates_to_data,
    dumps_stable,
    gate_to_data,
    plan_to_data,
    readiness_to_data,
    render_report,
    suitability_to_data,
)
from .scoring import check_responses, factor_degrees, responses_from_dict
from .suitability import Status, filter_practices, profile_from_dict

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CATALOG = 3
EXIT_NOGO = 4

STAGE_FORMATS = {1: "agilegate-stage1/1", 2: "agilegate-stage2/1", 3: "agilegate-stage3/1"}


class CatalogProblem(Exception):
    def __init__(self, error: AgileGateError | OSError) -> None:
        super().__init__(str(error))
        self.error = error


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _catalog(path: str) -> tuple[Catalog, bytes]:
    try:
        raw = Path(path).read_bytes()
        return load_catalog(raw), raw
    except (OSError, ParseError, ValidationError) as exc:
        raise CatalogProblem(exc) from None


def _doc(path: str, what: str) -> tuple[Any, bytes]:
    raw = _read(path)
    try:
        return read_json(raw), raw
    except ParseError as exc:
        raise InputError(f"{what} file {path}: {exc}") from None


def _policies(path: str | None) -> tuple[GatePolicy, ReadinessPolicy, bytes | None]:
    if path is None:
        return GatePolicy(), ReadinessPolicy(), None
    doc, raw = _doc(path, "policies")
    gate, ready = policies_from_dict(doc)
    return gate, ready, raw


def _digest(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def _emit(args: argparse.Namespace, payload: bytes) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()


def _parse_set(items: Sequence[str]) -> dict[str, Fraction]:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"--set expects <characteristic-id>=<degree>, got {item!r}")
        try:
            out[key.strip()] = as_fraction(value.strip())
        except (TypeError, ValueError, ZeroDivisionError):
            raise InputError(f"--set {key}: {value!r} is not a number") from None
    return out


def _pipeline_inputs(args: argparse.Namespace) -> PipelineInputs:
    catalog, catalog_raw = _catalog(args.catalog)
    profile_doc, profile_raw = _doc(args.profile, "profile")
    objectives_doc, objectives_raw = _doc(args.objectives, "objectives")
    responses_doc, responses_raw = _doc(args.responses, "responses")
    gate_policy, readiness_policy, policies_raw = _policies(args.policies)
    digests = {
        "catalog": _digest(catalog_raw),
        "profile": _digest(profile_raw),
        "objectives": _digest(objectives_raw),
        "responses": _digest(responses_raw),
    }
    if policies_raw is not None:
        digests["policies"] = _digest(policies_raw)
    return PipelineInputs(
        catalog=catalog,
        profile=profile_from_dict(profile_doc),
        objectives=objectives_from_dict(objectives_doc),
        responses=responses_from_dict(responses_doc),
        gate_policy=gate_policy,
        readiness_policy=readiness_policy,
        digests=digests,
    )


# --- commands ---------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        catalog = load_catalog(Path(args.catalog).read_bytes())
    except OSError as exc:
        print(f"cannot read {args.catalog}: {exc.strerror}")
        return EXIT_CATALOG
    except ParseError as exc:
        print(f"ParseError: {exc}")
        return EXIT_CATALOG
    except ValidationError as exc:
        for violation in exc.violations:
            print(violation)
        return EXIT_CATALOG
    print(
        f"catalog OK: {len(catalog.practices)} practices, "
        f"{len(catalog.success_factors)} success factors, "
        f"{len(catalog.org_characteristics)} organizational characteristics, "
        f"{len(catalog.conflict_rules) + len(catalog.preclusion_rules)} rules"
    )
    return EXIT_OK


def _run(args: argparse.Namespace, hypothetical: dict[str, Fraction] | None) -> int:
    report = run_pipeline(_pipeline_inputs(args), hypothetical)
    _emit(args, render_report(report, args.format))
    if args.gate_exit and report.verdict is Verdict.NO_GO:
        return EXIT_NOGO
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    return _run(args, None)


def cmd_what_if(args: argparse.Namespace) -> int:
    return _run(args, _parse_set(args.set))


def _stage_output(args: argparse.Namespace, stage: int, sections: dict[str, Any], human: list[str]) -> None:
    if args.format == "machine":
        payload = dumps_stable({"format": STAGE_FORMATS[stage], **sections})
    else:
        payload = "\n".join(human) + "\n"
    _emit(args, payload.encode("utf-8"))


def cmd_stage1(args: argparse.Namespace) -> int:
    catalog, _ = _catalog(args.catalog)
    responses_doc, _ = _doc(args.responses, "responses")
    gate_policy, _, _ = _policies(args.policies)
    responses = responses_from_dict(responses_doc)
    problems = check_responses(catalog, responses)
    if problems:
        raise InputError("invalid responses: " + "; ".join(problems))
    gate = decide_go_nogo(factor_degrees(catalog, responses), gate_policy)
    word = "GO" if gate.verdict is Verdict.GO else "NO-GO"
    human = [f"VERDICT: {word}", ""]
    for r in gate.factor_results:
        status = "pass" if r.passed else "FAIL"
        human.append(
            f"{r.factor}: degree {fmt4(r.degree)}, threshold {fmt4(r.threshold)}, "
            f"margin {fmt4(r.margin)} ({status})"
        )
    _stage_output(args, 1, {"gate": gate_to_data(gate)}, human)
    if args.gate_exit and gate.verdict is Verdict.NO_GO:
        return EXIT_NOGO
    return EXIT_OK


def _prior_section(path: str, key: str) -> dict[str, Any]:
    doc, _ = _doc(path, key)
    if not isinstance(doc, dict) or key not in doc:
        raise InputError(f"{path} has no {key!r} section")
    return doc[key]


def _gate_is_go(args: argparse.Namespace) -> bool:
    if args.assume_go:
        return True
    if not args.gate:
        raise InputError("pass --gate <stage-1 output> or --assume-go")
    verdict = _prior_section(args.gate, "gate").get("verdict")
    if verdict not in (Verdict.GO.value, Verdict.NO_GO.value):
        raise InputError(f"{args.gate}: unrecognized verdict {verdict!r}")
    return verdict == Verdict.GO.value


def _skipped_output(args: argparse.Namespace, stage: int, keys: Sequence[str]) -> int:
    _stage_output(args, stage, {k: {"skipped": "stage-1 no-go"} for k in keys}, ["skipped (stage-1 no-go)"])
    return EXIT_NOGO if args.gate_exit else EXIT_OK


def cmd_stage2(args: argparse.Namespace) -> int:
    catalog, _ = _catalog(args.catalog)
    profile_doc, _ = _doc(args.profile, "profile")
    profile = profile_from_dict(profile_doc)
    if not _gate_is_go(args):
        return _skipped_output(args, 2, ["suitability"])
    verdicts = filter_practices(catalog, profile, (p.id for p in catalog.practices))
    human = []
    for v in verdicts.values():
        human.append(f"{v.practice}: {v.status.value}")
        human.extend(f"  - {r.describe()}" for r in v.reasons)
    _stage_output(args, 2, {"suitability": suitability_to_data(verdicts)}, human)
    return EXIT_OK


def cmd_stage3(args: argparse.Namespace) -> int:
    catalog, _ = _catalog(args.catalog)
    objectives_doc, _ = _doc(args.objectives, "objectives")
    responses_doc, _ = _doc(args.responses, "responses")
    _, readiness_policy, _ = _policies(args.policies)
    objectives = objectives_from_dict(objectives_doc)
    responses = responses_from_dict(responses_doc)
    problems = check_responses(catalog, responses)
    if problems:
        raise InputError("invalid responses: " + "; ".join(problems))

    if args.suitability:
        section = _prior_section(args.suitability, "suitability")
        if "skipped" in section:
            return _skipped_output(args, 3, ["candidates", "readiness", "plan"])
        suitable = {
            v["practice"] for v in section.get("verdicts", []) if v.get("status") == Status.SUITABLE.value
        }
    elif args.assume_go and args.profile:
        profile_doc, _ = _doc(args.profile, "profile")
        verdicts = filter_practices(
            catalog, profile_from_dict(profile_doc), (p.id for p in catalog.practices)
        )
        suitable = {p for p, v in verdicts.items() if v.status is Status.SUITABLE}
    else:
        raise InputError("pass --suitability <stage-2 output>, or --assume-go with --profile")

    candidates = select_candidates(catalog, objectives, suitable)
    readiness = assess_readiness(catalog, candidates, responses, readiness_policy)
    plan = build_adoption_plan(catalog, candidates, readiness)
    human = [f"Candidates: {', '.join(sorted(candidates.candidates)) or '(none)'}"]
    for p in readiness.practices:
        state = "ready" if p.ready else "NOT READY"
        gaps = ", ".join(f"{k} short by {fmt4(v)}" for k, v in p.gaps)
        human.append(f"{p.practice}: readiness {fmt4(p.readiness)}, {state}" + (f" ({gaps})" if gaps else ""))
    human.append("Plan: " + (" -> ".join(plan.selected) or "(empty)"))
    human.extend(f"Excluded: {e.describe()}" for e in plan.excluded)
    _stage_output(
        args,
        3,
        {
            "candidates": candidates_to_data(candidates),
            "readiness": readiness_to_data(readiness),
            "plan": plan_to_data(plan),
        },
        human,
    )
    return EXIT_OK


def cmd_explain(args: argparse.Namespace) -> int:
    catalog, _ = _catalog(args.catalog)
    practice = catalog.practice(args.practice)
    print(f"{practice.id}: {practice.name}")
    print(f"objectives: {', '.join(sorted(practice.objectives)) or '(none)'}")
    print(f"prerequisites: {', '.join(transitive_prerequisites(catalog, practice.id)) or '(none)'}")
    reqs = practice.required_characteristics
    print("required characteristics: " + (", ".join(r.characteristic for r in reqs) or "(none)"))
    rules = [
        f"conflicts with {r.characteristic}: {r.rationale}"
        for r in catalog.conflict_rules
        if r.practice == practice.id
    ] + [
        f"precludes {r.quality}: {r.rationale}"
        for r in catalog.preclusion_rules
        if r.practice == practice.id
    ]
    print("rules:" if rules else "rules: (none)")
    for line in rules:
        print(f"  - {line}")
    if practice.note:
        print(f"note: {practice.note}")
    return EXIT_OK


LISTABLE = {
    "practices": lambda c: [(p.id, p.name) for p in c.practices],
    "objectives": lambda c: [(o.id, o.name) for o in c.objectives],
    "success-factors": lambda c: [(f.id, f.name) for f in c.success_factors],
    "org-characteristics": lambda c: [(o.id, o.name) for o in c.org_characteristics],
    "system-characteristics": lambda c: [(s.id, s.name) for s in c.system_characteristics],
    "qualities": lambda c: [(q.id, q.name) for q in c.qualities],
    "indicators": lambda c: [
        (i.id, f"[{i.respondent_role.value}, {i.scale.value}] {i.question}")
        for i in c.indicator_map.values()
    ],
}


def cmd_list(args: argparse.Namespace) -> int:
    catalog, _ = _catalog(args.catalog)
    for ident, text in LISTABLE[args.kind](catalog):
        print(f"{ident}\t{text}")
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agilegate",
        description="Decide which agile practices an organization building critical systems can adopt.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def output_opts(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("human", "machine"), default="human")
        p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("validate", help="check a catalog document")
    p.add_argument("--catalog", required=True)
    p.set_defaults(func=cmd_validate)

    for name, func, help_text in (
        ("run", cmd_run, "run all three stages"),
        ("what-if", cmd_what_if, "run all stages with assumed characteristic degrees"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--catalog", required=True)
        p.add_argument("--profile", required=True)
        p.add_argument("--objectives", required=True)
        p.add_argument("--responses", required=True)
        p.add_argument("--policies")
        output_opts(p)
        p.add_argument("--gate-exit", action="store_true", help="exit 4 on a No-go verdict")
        if name == "what-if":
            p.add_argument(
                "--set",
                action="append",
                default=[],
                metavar="CHARACTERISTIC=DEGREE",
                help="assume this degree of presence (repeatable)",
            )
        p.set_defaults(func=func)

    p = sub.add_parser("stage1", help="Go/No-go gate only")
    p.add_argument("--catalog", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--policies")
    output_opts(p)
    p.add_argument("--gate-exit", action="store_true")
    p.set_defaults(func=cmd_stage1)

    p = sub.add_parser("stage2", help="suitability filter only")
    p.add_argument("--catalog", required=True)
    p.add_argument("--profile", required=True)
    p.add_argument("--gate", help="stage-1 (or full run) machine output")
    p.add_argument("--assume-go", action="store_true")
    output_opts(p)
    p.add_argument("--gate-exit", action="store_true")
    p.set_defaults(func=cmd_stage2)

    p = sub.add_parser("stage3", help="candidate selection, readiness and plan only")
    p.add_argument("--catalog", required=True)
    p.add_argument("--objectives", required=True)
    p.add_argument("--responses", required=True)
    p.add_argument("--policies")
    p.add_argument("--suitability", help="stage-2 machine output")
    p.add_argument("--assume-go", action="store_true")
    p.add_argument("--profile", help="with --assume-go, compute suitability inline")
    output_opts(p)
    p.add_argument("--gate-exit", action="store_true")
    p.set_defaults(func=cmd_stage3)

    p = sub.add_parser("explain", help="describe one practice")
    p.add_argument("--catalog", required=True)
    p.add_argument("--practice", required=True)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("list", help="list a catalog vocabulary")
    p.add_argument("--catalog", required=True)
    p.add_argument("--kind", choices=sorted(LISTABLE), required=True)
    p.set_defaults(func=cmd_list)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CatalogProblem as exc:
        print(f"error: invalid catalog: {exc}", file=sys.stderr)
        return EXIT_CATALOG
    except ValidationError as exc:
        print(f"error: invalid catalog: {exc}", file=sys.stderr)
        return EXIT_CATALOG
    except AgileGateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
