"""Render decision reports and read machine reports back.

The machine format is JSON with sorted keys, two-space indentation and every
rational written with exactly four decimal places. Parsing it and rendering
again reproduces the same bytes.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from fractions import Fraction
from typing import Any

from ._numbers import fmt4
from .catalog import read_json
from .errors import ParseError
from .gating import FactorResult, GateDecision, GatePolicy, Verdict
from .pipeline import DecisionReport, Provenance, Skipped
from .readiness import (
    AdoptionPlan,
    CandidateSet,
    CharacteristicResult,
    Exclusion,
    ExclusionCause,
    PracticeReadiness,
    ReadinessPolicy,
    ReadinessReport,
)
from .suitability import Reason, RuleKind, Status, SuitabilityVerdict

FORMAT_TAG = "agilegate-report/1"


# --- to plain data ----------------------------------------------------------


def _gaps(gaps: tuple[tuple[str, Fraction], ...]) -> dict[str, Fraction]:
    return dict(gaps)


def _exclusion(e: Exclusion) -> dict[str, Any]:
    return {
        "practice": e.practice,
        "cause": e.cause.value,
        "chain": list(e.chain),
        "root_cause": e.root_cause.value,
        "gaps": _gaps(e.gaps),
        "summary": e.describe(),
    }


def _skipped(s: Skipped) -> dict[str, Any]:
    return {"skipped": s.reason}


def _readiness_policy(p: ReadinessPolicy) -> dict[str, Any]:
    if p.mode == "strict":
        return {"mode": "strict"}
    return {"mode": "threshold", "value": p.value}


def gate_to_data(gate: GateDecision) -> dict[str, Any]:
    return {
        "verdict": gate.verdict.value,
        "factors": [
            {
                "factor": r.factor,
                "degree": r.degree,
                "threshold": r.threshold,
                "passed": r.passed,
                "margin": r.margin,
            }
            for r in gate.factor_results
        ],
    }


def suitability_to_data(verdicts: Mapping[str, SuitabilityVerdict]) -> dict[str, Any]:
    return {
        "verdicts": [
            {
                "practice": v.practice,
                "status": v.status.value,
                "reasons": [
                    {"kind": r.kind.value, "target": r.target, "rationale": r.rationale}
                    for r in v.reasons
                ],
            }
            for v in verdicts.values()
        ]
    }


def candidates_to_data(c: CandidateSet) -> dict[str, Any]:
    return {
        "candidates": sorted(c.candidates),
        "pulled_prerequisites": sorted(c.pulled_prerequisites),
        "exclusions": [_exclusion(e) for e in c.exclusions],
    }


def readiness_to_data(r: ReadinessReport) -> dict[str, Any]:
    return {
        "policy": _readiness_policy(r.policy),
        "practices": [
            {
                "practice": p.practice,
                "characteristics": [
                    {
                        "characteristic": c.characteristic,
                        "degree": c.degree,
                        "weight": c.weight,
                        "overridden": c.overridden,
                    }
                    for c in p.characteristics
                ],
                "readiness": p.readiness,
                "ready": p.ready,
                "gaps": _gaps(p.gaps),
                "vacuous": p.vacuous,
                "dependency_induced": p.dependency_induced,
            }
            for p in r.practices
        ],
    }


def plan_to_data(plan: AdoptionPlan) -> dict[str, Any]:
    return {"selected": list(plan.selected), "excluded": [_exclusion(e) for e in plan.excluded]}


def provenance_to_data(p: Provenance) -> dict[str, Any]:
    return {
        "tool_version": p.tool_version,
        "inputs": dict(p.inputs),
        "profile": p.profile,
        "objectives": list(p.objectives),
        "policies": {
            "gate": {
                "default_threshold": p.gate_policy.default_threshold,
                "overrides": dict(p.gate_policy.overrides),
            },
            "readiness": _readiness_policy(p.readiness_policy),
        },
        "notes": list(p.notes),
        "overrides": dict(p.overrides),
    }


def report_to_data(report: DecisionReport) -> dict[str, Any]:
    def section(value: Any, convert: Any) -> dict[str, Any]:
        return _skipped(value) if isinstance(value, Skipped) else convert(value)

    return {
        "format": FORMAT_TAG,
        "provenance": provenance_to_data(report.provenance),
        "gate": gate_to_data(report.gate),
        "suitability": section(report.suitability, suitability_to_data),
        "candidates": section(report.candidates, candidates_to_data),
        "readiness": section(report.readiness, readiness_to_data),
        "plan": section(report.plan, plan_to_data),
    }


# --- deterministic JSON -----------------------------------------------------


def _emit(value: Any, depth: int, out: list[str]) -> None:
    pad = "  " * (depth + 1)
    if isinstance(value, bool) or value is None:
        out.append(json.dumps(value))
    elif isinstance(value, (Fraction, int)):
        out.append(fmt4(value))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, Mapping):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for n, key in enumerate(sorted(value)):
            out.append(f"{pad}{json.dumps(str(key), ensure_ascii=False)}: ")
            _emit(value[key], depth + 1, out)
            out.append(",\n" if n < len(value) - 1 else "\n")
        out.append("  " * depth + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for n, item in enumerate(value):
            out.append(pad)
            _emit(item, depth + 1, out)
            out.append(",\n" if n < len(value) - 1 else "\n")
        out.append("  " * depth + "]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_stable(data: Any) -> str:
    out: list[str] = []
    _emit(data, 0, out)
    return "".join(out) + "\n"


# --- back from plain data ---------------------------------------------------


def _frac(value: Any) -> Fraction:
    return Fraction(value)


def _exclusion_from(d: Mapping[str, Any]) -> Exclusion:
    return Exclusion(
        practice=d["practice"],
        cause=ExclusionCause(d["cause"]),
        chain=tuple(d["chain"]),
        root_cause=ExclusionCause(d["root_cause"]),
        gaps=tuple((k, _frac(v)) for k, v in d["gaps"].items()),
    )


def _readiness_policy_from(d: Mapping[str, Any]) -> ReadinessPolicy:
    if d["mode"] == "strict":
        return ReadinessPolicy.strict()
    return ReadinessPolicy.threshold(_frac(d["value"]))


def report_from_data(d: Mapping[str, Any]) -> DecisionReport:
    if d.get("format") != FORMAT_TAG:
        raise ParseError(f"not an agilegate report (format {d.get('format')!r})")

    def section(key: str, convert: Any) -> Any:
        value = d[key]
        if set(value) == {"skipped"}:
            return Skipped(value["skipped"])
        return convert(value)

    g = d["gate"]
    gate = GateDecision(
        Verdict(g["verdict"]),
        tuple(
            FactorResult(
                f["factor"], _frac(f["degree"]), _frac(f["threshold"]), f["passed"], _frac(f["margin"])
            )
            for f in g["factors"]
        ),
    )
    suitability = section(
        "suitability",
        lambda s: {
            v["practice"]: SuitabilityVerdict(
                v["practice"],
                Status(v["status"]),
                tuple(Reason(RuleKind(r["kind"]), r["target"], r["rationale"]) for r in v["reasons"]),
            )
            for v in s["verdicts"]
        },
    )
    candidates = section(
        "candidates",
        lambda c: CandidateSet(
            frozenset(c["candidates"]),
            frozenset(c["pulled_prerequisites"]),
            tuple(_exclusion_from(e) for e in c["exclusions"]),
        ),
    )
    readiness = section(
        "readiness",
        lambda r: ReadinessReport(
            _readiness_policy_from(r["policy"]),
            tuple(
                PracticeReadiness(
                    practice=p["practice"],
                    characteristics=tuple(
                        CharacteristicResult(
                            c["characteristic"], _frac(c["degree"]), _frac(c["weight"]), c["overridden"]
                        )
                        for c in p["characteristics"]
                    ),
                    readiness=_frac(p["readiness"]),
                    ready=p["ready"],
                    gaps=tuple((k, _frac(v)) for k, v in p["gaps"].items()),
                    vacuous=p["vacuous"],
                    dependency_induced=p["dependency_induced"],
                )
                for p in r["practices"]
            ),
        ),
    )
    plan = section(
        "plan",
        lambda p: AdoptionPlan(tuple(p["selected"]), tuple(_exclusion_from(e) for e in p["excluded"])),
    )
    pv = d["provenance"]
    gp = pv["policies"]["gate"]
    provenance = Provenance(
        tool_version=pv["tool_version"],
        inputs=tuple(sorted(pv["inputs"].items())),
        profile=pv["profile"],
        objectives=tuple(pv["objectives"]),
        gate_policy=GatePolicy(
            _frac(gp["default_threshold"]), {k: _frac(v) for k, v in gp["overrides"].items()}
        ),
        readiness_policy=_readiness_policy_from(pv["policies"]["readiness"]),
        notes=tuple(pv["notes"]),
        overrides=tuple(sorted((k, _frac(v)) for k, v in pv["overrides"].items())),
    )
    return DecisionReport(gate, suitability, candidates, readiness, plan, provenance)


def parse_machine_report(source: bytes | str) -> DecisionReport:
    try:
        return report_from_data(read_json(source))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed report: {exc!r}") from None


# --- rendering --------------------------------------------------------------


def render_machine(report: DecisionReport) -> str:
    return dumps_stable(report_to_data(report))


def _status_word(verdict: Verdict) -> str:
    return "GO" if verdict is Verdict.GO else "NO-GO"


def render_human(report: DecisionReport) -> str:
    lines: list[str] = []
    add = lines.append
    pv = report.provenance
    add("# agilegate decision report")
    add("")
    add(f"VERDICT: {_status_word(report.verdict)}")
    add("")
    add(f"Profile: {pv.profile or '(unnamed)'}")
    add(f"Objectives: {', '.join(pv.objectives) or '(none)'}")
    add(f"Gate threshold: {fmt4(pv.gate_policy.default_threshold)} (default)")
    for factor, t in pv.gate_policy.overrides.items():
        add(f"  override {factor}: {fmt4(t)}")
    rp = pv.readiness_policy
    add(f"Readiness policy: {rp.mode} (level {fmt4(rp.level)})")
    for note in pv.notes:
        add(f"Note: {note}")
    if pv.overrides:
        add("What-if overrides: " + ", ".join(f"{k}={fmt4(v)}" for k, v in pv.overrides))
    add(f"Tool version: {pv.tool_version}")

    add("")
    add("## Stage 1: Go/No-go")
    add("")
    add("| factor | degree | threshold | margin | result |")
    add("|---|---|---|---|---|")
    for r in report.gate.factor_results:
        result = "pass" if r.passed else "FAIL"
        add(f"| {r.factor} | {fmt4(r.degree)} | {fmt4(r.threshold)} | {fmt4(r.margin)} | {result} |")
    failing = report.gate.failing
    if failing:
        add("")
        add("Failing success factors:")
        for r in failing:
            add(f"- {r.factor}: degree {fmt4(r.degree)}, margin {fmt4(r.margin)}")

    add("")
    add("## Stage 2: Suitability")
    add("")
    if isinstance(report.suitability, Skipped):
        add(f"skipped ({report.suitability.reason})")
    else:
        for v in report.suitability.values():
            add(f"- {v.practice}: {v.status.value}")
            for reason in v.reasons:
                add(f"  - {reason.describe()}")

    add("")
    add("## Stage 3: Readiness")
    add("")
    if isinstance(report.readiness, Skipped):
        add(f"skipped ({report.readiness.reason})")
    else:
        cands = report.candidates
        assert isinstance(cands, CandidateSet)
        add(f"Candidates: {', '.join(sorted(cands.candidates)) or '(none)'}")
        if cands.pulled_prerequisites:
            add(f"Dependency-induced: {', '.join(sorted(cands.pulled_prerequisites))}")
        add("")
        add("| practice | characteristic | degree | gap |")
        add("|---|---|---|---|")
        for p in report.readiness.practices:
            if p.vacuous:
                add(f"| {p.practice} | (none required) | - | - |")
            gaps = dict(p.gaps)
            for c in p.characteristics:
                mark = " (what-if)" if c.overridden else ""
                gap = fmt4(gaps.get(c.characteristic, Fraction(0)))
                add(f"| {p.practice} | {c.characteristic}{mark} | {fmt4(c.degree)} | {gap} |")
        add("")
        for p in report.readiness.practices:
            state = "ready" if p.ready else "NOT READY"
            extra = " (no required characteristics in catalog)" if p.vacuous else ""
            add(f"- {p.practice}: readiness {fmt4(p.readiness)}, {state}{extra}")

    add("")
    add("## Adoption plan")
    add("")
    if isinstance(report.plan, Skipped):
        add(f"skipped ({report.plan.reason})")
    else:
        if report.plan.selected:
            for n, practice in enumerate(report.plan.selected, 1):
                add(f"{n}. {practice}")
        else:
            add("(no practices selected)")
        if report.plan.excluded:
            add("")
            add("Excluded:")
            for e in report.plan.excluded:
                gaps = ", ".join(f"{k} short by {fmt4(v)}" for k, v in e.gaps)
                add(f"- {e.describe()}" + (f" ({gaps})" if gaps else ""))
    return "\n".join(lines) + "\n"


def render_report(report: DecisionReport, format: str = "human") -> bytes:
    if format == "machine":
        return render_machine(report).encode("utf-8")
    if format == "human":
        return render_human(report).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")
