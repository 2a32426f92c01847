"""Run the three stages in order and collect one decision report.

Stage 1 gates everything: on No-go the later stages are not computed at all
and are reported as skipped.
"""

from __future__ import annotations

import hashlib
import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Any, Union

from . import __version__, gating, readiness, scoring, suitability
from ._numbers import Number, as_fraction
from .catalog import Catalog, catalog_to_dict, read_json, validate_catalog
from .errors import AgileGateError, InputError, ValidationError
from .gating import GateDecision, GatePolicy, Verdict
from .readiness import (
    AdoptionObjectives,
    AdoptionPlan,
    CandidateSet,
    ReadinessPolicy,
    ReadinessReport,
)
from .scoring import ResponseSet
from .suitability import ProjectProfile, SuitabilityVerdict

NOGO_REASON = "stage-1 no-go"


@dataclass(frozen=True)
class Skipped:
    reason: str = NOGO_REASON


@dataclass(frozen=True)
class PipelineInputs:
    catalog: Catalog
    profile: ProjectProfile
    objectives: AdoptionObjectives
    responses: ResponseSet
    gate_policy: GatePolicy = field(default_factory=GatePolicy)
    readiness_policy: ReadinessPolicy = field(default_factory=ReadinessPolicy)
    # name -> sha256; computed from the canonical form of each input when absent
    digests: Mapping[str, str] | None = None


@dataclass(frozen=True)
class Provenance:
    tool_version: str
    inputs: tuple[tuple[str, str], ...]
    profile: str
    objectives: tuple[str, ...]
    gate_policy: GatePolicy
    readiness_policy: ReadinessPolicy
    notes: tuple[str, ...]
    overrides: tuple[tuple[str, Fraction], ...] = ()


@dataclass(frozen=True)
class DecisionReport:
    gate: GateDecision
    suitability: Union[dict[str, SuitabilityVerdict], Skipped]
    candidates: Union[CandidateSet, Skipped]
    readiness: Union[ReadinessReport, Skipped]
    plan: Union[AdoptionPlan, Skipped]
    provenance: Provenance

    @property
    def verdict(self) -> Verdict:
        return self.gate.verdict


def canonical_digest(doc: Any) -> str:
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _default_digests(inputs: PipelineInputs) -> dict[str, str]:
    return {
        "catalog": canonical_digest(catalog_to_dict(inputs.catalog)),
        "profile": canonical_digest(suitability.profile_to_dict(inputs.profile)),
        "objectives": canonical_digest(readiness.objectives_to_dict(inputs.objectives)),
        "responses": canonical_digest(scoring.responses_to_dict(inputs.responses)),
    }


def validate_inputs(inputs: PipelineInputs) -> None:
    """Cross-check every input document before any stage runs."""
    violations = validate_catalog(inputs.catalog)
    if violations:
        raise ValidationError(violations)
    catalog = inputs.catalog
    try:
        suitability.check_profile(catalog, inputs.profile)
        readiness.resolve_objectives(catalog, inputs.objectives)
    except AgileGateError as exc:
        raise exc.add_context("stage", "input")
    problems = scoring.check_responses(catalog, inputs.responses)
    if problems:
        raise InputError("invalid responses: " + "; ".join(problems)).add_context("stage", "input")


def run_pipeline(
    inputs: PipelineInputs,
    hypothetical: Mapping[str, Number] | None = None,
) -> DecisionReport:
    """Gate, filter, select and assess; ``hypothetical`` feeds a what-if run."""
    validate_inputs(inputs)
    catalog = inputs.catalog
    overrides = tuple(sorted((k, as_fraction(v)) for k, v in (hypothetical or {}).items()))
    digests = dict(inputs.digests) if inputs.digests is not None else _default_digests(inputs)
    provenance = Provenance(
        tool_version=__version__,
        inputs=tuple(sorted(digests.items())),
        profile=inputs.profile.name,
        objectives=tuple(sorted(inputs.objectives.objectives)),
        gate_policy=inputs.gate_policy,
        readiness_policy=inputs.readiness_policy,
        notes=(gating.BOUNDARY_NOTE, readiness.DEPENDENCY_NOTE),
        overrides=overrides,
    )

    try:
        degrees = scoring.factor_degrees(catalog, inputs.responses)
        gate = gating.decide_go_nogo(degrees, inputs.gate_policy)
    except AgileGateError as exc:
        raise exc.add_context("stage", "stage1")
    if gate.verdict is Verdict.NO_GO:
        skipped = Skipped()
        return DecisionReport(gate, skipped, skipped, skipped, skipped, provenance)

    try:
        verdicts = suitability.filter_practices(
            catalog, inputs.profile, (p.id for p in catalog.practices)
        )
    except AgileGateError as exc:
        raise exc.add_context("stage", "stage2")

    try:
        candidates = readiness.select_candidates(
            catalog, inputs.objectives, suitability.suitable_set(verdicts)
        )
        if hypothetical:
            report = readiness.what_if(
                catalog, candidates, inputs.responses, inputs.readiness_policy, hypothetical
            )
        else:
            report = readiness.assess_readiness(
                catalog, candidates, inputs.responses, inputs.readiness_policy
            )
        plan = readiness.build_adoption_plan(catalog, candidates, report)
    except AgileGateError as exc:
        raise exc.add_context("stage", "stage3")
    return DecisionReport(gate, verdicts, candidates, report, plan, provenance)


def policies_from_dict(doc: Any) -> tuple[GatePolicy, ReadinessPolicy]:
    if doc is None:
        return GatePolicy(), ReadinessPolicy()
    if not isinstance(doc, Mapping) or set(doc) - {"gate", "readiness"}:
        raise InputError("policies document may only contain 'gate' and 'readiness'")
    return (
        gating.gate_policy_from_dict(doc.get("gate")),
        readiness.readiness_policy_from_dict(doc.get("readiness")),
    )


def load_policies(source: bytes | str | IO[Any]) -> tuple[GatePolicy, ReadinessPolicy]:
    return policies_from_dict(read_json(source))
