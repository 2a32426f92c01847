"""Pick candidate practices, assess organizational readiness, build the plan.

Candidates are the suitable practices serving at least one adoption objective,
plus everything they transitively depend on. A practice whose dependency is
not suitable is excluded, and the exclusion records the chain down to the
practice that caused it. Readiness for a practice is the *minimum* degree of
presence over its required organizational characteristics: one weak
characteristic is enough to hold the practice back.
"""

from __future__ import annotations

import enum
from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Any

from ._numbers import Number, as_fraction, rational_to_json
from .catalog import Catalog, read_json, topological_order, transitive_prerequisites
from .errors import (
    AgileGateError,
    InputError,
    OutOfRangeDegree,
    UnknownCharacteristic,
    UnknownObjective,
)
from .scoring import ResponseSet, construct_degree

DEPENDENCY_NOTE = (
    "dependency-induced prerequisites must themselves be suitable and ready; "
    "a practice is only adopted together with its whole prerequisite chain"
)


class ExclusionCause(str, enum.Enum):
    NOT_SUITABLE = "NotSuitable"
    NOT_READY = "NotReady"
    PREREQUISITE_EXCLUDED = "PrerequisiteExcluded"


@dataclass(frozen=True)
class Exclusion:
    """Why a practice is left out.

    ``chain`` starts at the excluded practice and walks prerequisites down to
    the practice that is itself unsuitable or not ready (``chain[-1]``).
    ``gaps`` are that root practice's shortfalls when it is not ready.
    """

    practice: str
    cause: ExclusionCause
    chain: tuple[str, ...]
    root_cause: ExclusionCause
    gaps: tuple[tuple[str, Fraction], ...] = ()

    def describe(self) -> str:
        return " ← ".join(self.chain) + f": {self.root_cause.value}"


@dataclass(frozen=True)
class AdoptionObjectives:
    objectives: frozenset[str]


@dataclass(frozen=True)
class ReadinessPolicy:
    """``strict`` requires every characteristic fully present (level 1)."""

    mode: str = "strict"
    value: Fraction = Fraction(1)

    def __post_init__(self) -> None:
        if self.mode not in ("strict", "threshold"):
            raise InputError(f"unknown readiness mode {self.mode!r}")
        value = Fraction(1) if self.mode == "strict" else as_fraction(self.value)
        if not 0 <= value <= 1:
            raise InputError(f"readiness threshold must be in [0, 1], got {value}")
        object.__setattr__(self, "value", value)

    @classmethod
    def strict(cls) -> ReadinessPolicy:
        return cls("strict")

    @classmethod
    def threshold(cls, t: Number) -> ReadinessPolicy:
        return cls("threshold", as_fraction(t))

    @property
    def level(self) -> Fraction:
        return self.value


@dataclass(frozen=True)
class CandidateSet:
    candidates: frozenset[str] = frozenset()
    pulled_prerequisites: frozenset[str] = frozenset()
    exclusions: tuple[Exclusion, ...] = ()


@dataclass(frozen=True)
class CharacteristicResult:
    characteristic: str
    degree: Fraction
    weight: Fraction = Fraction(1)
    overridden: bool = False


@dataclass(frozen=True)
class PracticeReadiness:
    practice: str
    characteristics: tuple[CharacteristicResult, ...]
    readiness: Fraction
    ready: bool
    gaps: tuple[tuple[str, Fraction], ...] = ()
    vacuous: bool = False
    dependency_induced: bool = False


@dataclass(frozen=True)
class ReadinessReport:
    policy: ReadinessPolicy
    practices: tuple[PracticeReadiness, ...] = ()

    def for_practice(self, practice: str) -> PracticeReadiness:
        for entry in self.practices:
            if entry.practice == practice:
                return entry
        raise KeyError(practice)


@dataclass(frozen=True)
class AdoptionPlan:
    selected: tuple[str, ...] = ()
    excluded: tuple[Exclusion, ...] = ()


def resolve_objectives(catalog: Catalog, objectives: AdoptionObjectives | Iterable[str]) -> frozenset[str]:
    if isinstance(objectives, AdoptionObjectives):
        objectives = objectives.objectives
    objs = frozenset(objectives)
    if not objs:
        raise InputError("at least one adoption objective is required")
    unknown = sorted(objs - catalog.objective_ids)
    if unknown:
        raise UnknownObjective(f"unknown objectives {unknown}")
    return objs


def _path_to_unsuitable(catalog: Catalog, start: str, suitable: frozenset[str]) -> tuple[str, ...] | None:
    # Breadth-first, so the reported root is the nearest unsuitable dependency.
    parents: dict[str, str] = {}
    queue = deque([start])
    seen = {start}
    while queue:
        node = queue.popleft()
        for prereq in sorted(catalog.practice(node).prerequisites):
            if prereq in seen:
                continue
            seen.add(prereq)
            parents[prereq] = node
            if prereq not in suitable:
                path = [prereq]
                while path[-1] != start:
                    path.append(parents[path[-1]])
                return tuple(reversed(path))
            queue.append(prereq)
    return None


def select_candidates(
    catalog: Catalog,
    objectives: AdoptionObjectives | Iterable[str],
    suitable: Iterable[str],
) -> CandidateSet:
    objs = resolve_objectives(catalog, objectives)
    suitable = frozenset(suitable)
    for practice in suitable:
        catalog.practice(practice)

    base = sorted(p for p in suitable if catalog.practice(p).objectives & objs)
    kept: list[str] = []
    exclusions = []
    for practice in base:
        path = _path_to_unsuitable(catalog, practice, suitable)
        if path is None:
            kept.append(practice)
        else:
            exclusions.append(
                Exclusion(
                    practice,
                    ExclusionCause.PREREQUISITE_EXCLUDED,
                    path,
                    ExclusionCause.NOT_SUITABLE,
                )
            )

    candidates = set(kept)
    for practice in kept:
        candidates.update(transitive_prerequisites(catalog, practice))
    return CandidateSet(
        candidates=frozenset(candidates),
        pulled_prerequisites=frozenset(candidates.difference(base)),
        exclusions=tuple(exclusions),
    )


def _assess(
    catalog: Catalog,
    candidates: CandidateSet,
    responses: ResponseSet,
    policy: ReadinessPolicy,
    overrides: Mapping[str, Fraction],
) -> ReadinessReport:
    level = policy.level
    degrees: dict[str, Fraction] = dict(overrides)
    entries = []
    for practice in sorted(candidates.candidates):
        results = []
        for req in catalog.practice(practice).required_characteristics:
            cid = req.characteristic
            if cid not in degrees:
                try:
                    degrees[cid] = construct_degree(catalog.org_characteristic_map[cid], responses)
                except AgileGateError as exc:
                    raise exc.add_context("characteristic", cid).add_context("practice", practice)
            results.append(CharacteristicResult(cid, degrees[cid], req.weight, cid in overrides))
        readiness = min((r.degree for r in results), default=Fraction(1))
        gaps = tuple((r.characteristic, level - r.degree) for r in results if r.degree < level)
        entries.append(
            PracticeReadiness(
                practice=practice,
                characteristics=tuple(results),
                readiness=readiness,
                ready=not gaps,
                gaps=gaps,
                vacuous=not results,
                dependency_induced=practice in candidates.pulled_prerequisites,
            )
        )
    return ReadinessReport(policy, tuple(entries))


def assess_readiness(
    catalog: Catalog,
    candidates: CandidateSet,
    responses: ResponseSet,
    policy: ReadinessPolicy | None = None,
) -> ReadinessReport:
    """Score each candidate's required characteristics and judge readiness.

    A practice with no required characteristics is ready with readiness 1 and
    is flagged ``vacuous`` so incomplete catalog data stays visible.
    """
    return _assess(catalog, candidates, responses, policy or ReadinessPolicy(), {})


def what_if(
    catalog: Catalog,
    candidates: CandidateSet,
    responses: ResponseSet,
    policy: ReadinessPolicy | None,
    hypothetical: Mapping[str, Number],
) -> ReadinessReport:
    """Readiness with some characteristic degrees replaced by assumed values."""
    overrides = {}
    for cid, raw in sorted(hypothetical.items()):
        if cid not in catalog.org_characteristic_map:
            raise UnknownCharacteristic(f"unknown organizational characteristic {cid!r}")
        value = as_fraction(raw)
        if not 0 <= value <= 1:
            raise OutOfRangeDegree(f"degree for {cid!r} must be in [0, 1], got {raw}")
        overrides[cid] = value
    return _assess(catalog, candidates, responses, policy or ReadinessPolicy(), overrides)


def build_adoption_plan(
    catalog: Catalog, candidates: CandidateSet, readiness: ReadinessReport
) -> AdoptionPlan:
    """Select ready candidates whose whole prerequisite chain is selected.

    The excluded list starts with the candidate-selection exclusions, then
    covers every remaining candidate that was not selected.
    """
    selected: list[str] = []
    excluded: dict[str, Exclusion] = {}
    for practice in topological_order(catalog, candidates.candidates):
        entry = readiness.for_practice(practice)
        if not entry.ready:
            excluded[practice] = Exclusion(
                practice, ExclusionCause.NOT_READY, (practice,), ExclusionCause.NOT_READY, entry.gaps
            )
            continue
        blocked = sorted(q for q in catalog.practice(practice).prerequisites if q in excluded)
        if blocked:
            below = excluded[blocked[0]]
            excluded[practice] = Exclusion(
                practice,
                ExclusionCause.PREREQUISITE_EXCLUDED,
                (practice, *below.chain),
                below.root_cause,
                below.gaps,
            )
            continue
        selected.append(practice)
    return AdoptionPlan(tuple(selected), (*candidates.exclusions, *excluded.values()))


# --- documents --------------------------------------------------------------


def objectives_from_dict(doc: Any) -> AdoptionObjectives:
    if not isinstance(doc, Mapping) or set(doc) != {"objectives"} or not isinstance(doc["objectives"], list):
        raise InputError("objectives document must be {\"objectives\": [ids]}")
    if not doc["objectives"]:
        raise InputError("at least one adoption objective is required")
    return AdoptionObjectives(frozenset(map(str, doc["objectives"])))


def objectives_to_dict(objectives: AdoptionObjectives) -> dict[str, Any]:
    return {"objectives": sorted(objectives.objectives)}


def load_objectives(source: bytes | str | IO[Any]) -> AdoptionObjectives:
    return objectives_from_dict(read_json(source))


def readiness_policy_from_dict(doc: Any) -> ReadinessPolicy:
    if doc is None:
        return ReadinessPolicy()
    if not isinstance(doc, Mapping):
        raise InputError("readiness policy must be an object")
    mode = doc.get("mode", "strict")
    if mode == "strict":
        if set(doc) - {"mode"}:
            raise InputError("strict readiness policy takes no other keys")
        return ReadinessPolicy.strict()
    if mode == "threshold":
        if set(doc) != {"mode", "value"}:
            raise InputError("threshold readiness policy needs exactly 'mode' and 'value'")
        try:
            return ReadinessPolicy.threshold(doc["value"])
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad readiness threshold: {exc}") from None
    raise InputError(f"unknown readiness mode {mode!r}")


def readiness_policy_to_dict(policy: ReadinessPolicy) -> dict[str, Any]:
    if policy.mode == "strict":
        return {"mode": "strict"}
    return {"mode": "threshold", "value": rational_to_json(policy.value)}
