"""The knowledge base: practices, constructs, vocabularies and rules.

A catalog is plain data loaded from one JSON document. Loading is a two-step
affair: the document is checked against a strict JSON Schema (unknown keys are
rejected), then the resulting :class:`Catalog` is checked for referential
integrity, duplicate ids, empty aspects, weights and prerequisite cycles by
:func:`validate_catalog`. Every violation is collected, not just the first.
"""

from __future__ import annotations

import enum
import heapq
import json
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from importlib import resources
from typing import IO, Any

import jsonschema

from ._numbers import as_fraction, rational_to_json
from .errors import ParseError, UnknownPractice, ValidationError

IDENTIFIER_RE = re.compile(r"^[a-z0-9]+(?:-[a-z0-9]+)*$")


class Role(str, enum.Enum):
    MANAGER = "manager"
    DEVELOPER = "developer"
    ASSESSOR = "assessor"


class Scale(str, enum.Enum):
    BINARY = "binary"
    ORDINAL5 = "ordinal5"


class ConstructKind(str, enum.Enum):
    SUCCESS_FACTOR = "success_factor"
    ORG_CHARACTERISTIC = "org_characteristic"


@dataclass(frozen=True)
class Indicator:
    id: str
    question: str
    respondent_role: Role
    scale: Scale
    weight: Fraction = Fraction(1)
    allows_na: bool = False


@dataclass(frozen=True)
class Aspect:
    id: str
    name: str
    indicators: tuple[Indicator, ...]
    weight: Fraction = Fraction(1)


@dataclass(frozen=True)
class MeasuredConstruct:
    """A success factor or an organizational characteristic."""

    id: str
    name: str
    aspects: tuple[Aspect, ...]
    kind: ConstructKind

    def indicators(self) -> Iterable[Indicator]:
        for aspect in self.aspects:
            yield from aspect.indicators


@dataclass(frozen=True)
class RequiredCharacteristic:
    characteristic: str
    weight: Fraction = Fraction(1)


@dataclass(frozen=True)
class AgilePractice:
    id: str
    name: str
    objectives: frozenset[str] = frozenset()
    prerequisites: frozenset[str] = frozenset()
    required_characteristics: tuple[RequiredCharacteristic, ...] = ()
    note: str = ""


@dataclass(frozen=True)
class Term:
    """Named vocabulary entry: objective, system characteristic or quality."""

    id: str
    name: str
    description: str = ""


@dataclass(frozen=True)
class ConflictRule:
    practice: str
    characteristic: str
    rationale: str


@dataclass(frozen=True)
class PreclusionRule:
    practice: str
    quality: str
    rationale: str


@dataclass(frozen=True)
class Catalog:
    practices: tuple[AgilePractice, ...] = ()
    objectives: tuple[Term, ...] = ()
    success_factors: tuple[MeasuredConstruct, ...] = ()
    org_characteristics: tuple[MeasuredConstruct, ...] = ()
    system_characteristics: tuple[Term, ...] = ()
    qualities: tuple[Term, ...] = ()
    conflict_rules: tuple[ConflictRule, ...] = ()
    preclusion_rules: tuple[PreclusionRule, ...] = ()

    @cached_property
    def practice_map(self) -> dict[str, AgilePractice]:
        return {p.id: p for p in self.practices}

    @cached_property
    def factor_map(self) -> dict[str, MeasuredConstruct]:
        return {f.id: f for f in self.success_factors}

    @cached_property
    def org_characteristic_map(self) -> dict[str, MeasuredConstruct]:
        return {c.id: c for c in self.org_characteristics}

    @cached_property
    def indicator_map(self) -> dict[str, Indicator]:
        return {
            i.id: i
            for c in (*self.success_factors, *self.org_characteristics)
            for i in c.indicators()
        }

    @cached_property
    def objective_ids(self) -> frozenset[str]:
        return frozenset(o.id for o in self.objectives)

    @cached_property
    def system_characteristic_ids(self) -> frozenset[str]:
        return frozenset(c.id for c in self.system_characteristics)

    @cached_property
    def quality_ids(self) -> frozenset[str]:
        return frozenset(q.id for q in self.qualities)

    def practice(self, practice_id: str) -> AgilePractice:
        try:
            return self.practice_map[practice_id]
        except KeyError:
            raise UnknownPractice(f"unknown practice {practice_id!r}") from None


# --- violations -------------------------------------------------------------


class ViolationKind(str, enum.Enum):
    SCHEMA = "Schema"
    INVALID_IDENTIFIER = "InvalidIdentifier"
    DUPLICATE_ID = "DuplicateId"
    DUPLICATE_RULE = "DuplicateRule"
    DANGLING_REFERENCE = "DanglingReference"
    SELF_PREREQUISITE = "SelfPrerequisite"
    CYCLE = "Cycle"
    EMPTY_CONSTRUCT = "EmptyConstruct"
    EMPTY_ASPECT = "EmptyAspect"
    EMPTY_TEXT = "EmptyText"
    NON_POSITIVE_WEIGHT = "NonPositiveWeight"
    KIND_MISMATCH = "KindMismatch"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    subject: str
    detail: str = ""

    def __str__(self) -> str:
        text = f"{self.kind.value}({self.subject})"
        return f"{text}: {self.detail}" if self.detail else text


# --- graph helpers ----------------------------------------------------------


def _strongly_connected(graph: Mapping[str, Iterable[str]]) -> list[list[str]]:
    """Tarjan's algorithm, iterative. Edges to unknown nodes are ignored."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components: list[list[str]] = []
    counter = 0

    for root in sorted(graph):
        if root in index:
            continue
        work = [(root, iter(sorted(n for n in graph[root] if n in graph)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, children = work[-1]
            advanced = False
            for child in children:
                if child not in index:
                    index[child] = low[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(sorted(n for n in graph[child] if n in graph))))
                    advanced = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                components.append(sorted(component))
    return components


def find_cycles(catalog: Catalog) -> list[list[str]]:
    """Prerequisite cycles of length >= 2, each as a sorted member list."""
    graph = {p.id: p.prerequisites for p in catalog.practices}
    return sorted(c for c in _strongly_connected(graph) if len(c) > 1)


def topological_order(catalog: Catalog, practice_ids: Iterable[str]) -> list[str]:
    """Order ``practice_ids`` so prerequisites come first.

    Only edges inside the given subset are considered. Ties are broken by
    identifier so the order is the same on every run.
    """
    nodes = set(practice_ids)
    pending = {
        p: {q for q in catalog.practice(p).prerequisites if q in nodes} for p in nodes
    }
    dependents: dict[str, list[str]] = {p: [] for p in nodes}
    for p, prereqs in pending.items():
        for q in prereqs:
            dependents[q].append(p)
    ready = [p for p, prereqs in pending.items() if not prereqs]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for dependent in dependents[node]:
            pending[dependent].discard(node)
            if not pending[dependent]:
                heapq.heappush(ready, dependent)
    if len(order) != len(nodes):
        stuck = sorted(nodes.difference(order))
        raise ValueError(f"prerequisite cycle among {stuck}")
    return order


def transitive_prerequisites(catalog: Catalog, practice: str) -> list[str]:
    """Every practice reachable through prerequisites, dependencies first.

    The queried practice itself is never included.
    """
    start = catalog.practice(practice)
    seen: set[str] = set()
    stack = list(start.prerequisites)
    while stack:
        current = stack.pop()
        if current in seen or current == practice:
            continue
        seen.add(current)
        stack.extend(catalog.practice(current).prerequisites)
    return topological_order(catalog, seen)


# --- validation -------------------------------------------------------------


def validate_catalog(catalog: Catalog) -> list[Violation]:
    """Return every invariant violation; an empty list means the catalog is valid."""
    out: list[Violation] = []

    def add(kind: ViolationKind, subject: str, detail: str = "") -> None:
        out.append(Violation(kind, subject, detail))

    def check_ids(namespace: str, ids: Iterable[str]) -> set[str]:
        seen: set[str] = set()
        for ident in ids:
            if not isinstance(ident, str) or not IDENTIFIER_RE.match(ident):
                add(ViolationKind.INVALID_IDENTIFIER, str(ident), f"bad {namespace} id")
            if ident in seen:
                add(ViolationKind.DUPLICATE_ID, ident, f"duplicate {namespace} id")
            seen.add(ident)
        return seen

    def check_weight(subject: str, weight: Fraction) -> None:
        if not weight > 0:
            add(ViolationKind.NON_POSITIVE_WEIGHT, subject, f"weight {weight} is not positive")

    practice_ids = check_ids("practice", (p.id for p in catalog.practices))
    objective_ids = check_ids("objective", (o.id for o in catalog.objectives))
    check_ids("success factor", (f.id for f in catalog.success_factors))
    org_ids = check_ids("org characteristic", (c.id for c in catalog.org_characteristics))
    sys_ids = check_ids("system characteristic", (c.id for c in catalog.system_characteristics))
    quality_ids = check_ids("quality", (q.id for q in catalog.qualities))
    check_ids(
        "indicator",
        (
            i.id
            for c in (*catalog.success_factors, *catalog.org_characteristics)
            for i in c.indicators()
        ),
    )

    for expected, constructs in (
        (ConstructKind.SUCCESS_FACTOR, catalog.success_factors),
        (ConstructKind.ORG_CHARACTERISTIC, catalog.org_characteristics),
    ):
        for construct in constructs:
            if construct.kind != expected:
                add(ViolationKind.KIND_MISMATCH, construct.id, f"listed as {expected.value}")
            if not construct.aspects:
                add(ViolationKind.EMPTY_CONSTRUCT, construct.id, "no aspects")
            check_ids(f"aspect (in {construct.id})", (a.id for a in construct.aspects))
            for aspect in construct.aspects:
                check_weight(aspect.id, aspect.weight)
                if not aspect.indicators:
                    add(ViolationKind.EMPTY_ASPECT, aspect.id, "aspect has no indicators")
                for indicator in aspect.indicators:
                    check_weight(indicator.id, indicator.weight)
                    if not indicator.question.strip():
                        add(ViolationKind.EMPTY_TEXT, indicator.id, "empty question")

    for practice in catalog.practices:
        for objective in sorted(practice.objectives):
            if objective not in objective_ids:
                add(ViolationKind.DANGLING_REFERENCE, practice.id, f"unknown objective {objective!r}")
        for prereq in sorted(practice.prerequisites):
            if prereq == practice.id:
                add(ViolationKind.SELF_PREREQUISITE, practice.id, "practice requires itself")
            elif prereq not in practice_ids:
                add(ViolationKind.DANGLING_REFERENCE, practice.id, f"unknown prerequisite {prereq!r}")
        seen_chars: set[str] = set()
        for req in practice.required_characteristics:
            if req.characteristic not in org_ids:
                add(
                    ViolationKind.DANGLING_REFERENCE,
                    practice.id,
                    f"unknown org characteristic {req.characteristic!r}",
                )
            if req.characteristic in seen_chars:
                add(ViolationKind.DUPLICATE_ID, practice.id, f"{req.characteristic!r} required twice")
            seen_chars.add(req.characteristic)
            check_weight(f"{practice.id}/{req.characteristic}", req.weight)

    def check_rules(rules: Iterable[Any], target_attr: str, targets: set[str], label: str) -> None:
        seen: set[tuple[str, str]] = set()
        for rule in rules:
            target = getattr(rule, target_attr)
            subject = f"{rule.practice}/{target}"
            if rule.practice not in practice_ids:
                add(ViolationKind.DANGLING_REFERENCE, subject, f"{label} names unknown practice")
            if target not in targets:
                add(ViolationKind.DANGLING_REFERENCE, subject, f"{label} names unknown {target_attr}")
            if (rule.practice, target) in seen:
                add(ViolationKind.DUPLICATE_RULE, subject, f"duplicate {label}")
            seen.add((rule.practice, target))
            if not rule.rationale.strip():
                add(ViolationKind.EMPTY_TEXT, subject, "empty rationale")

    check_rules(catalog.conflict_rules, "characteristic", sys_ids, "conflict rule")
    check_rules(catalog.preclusion_rules, "quality", quality_ids, "preclusion rule")

    for cycle in find_cycles(catalog):
        add(ViolationKind.CYCLE, ",".join(cycle), "prerequisite cycle {" + ", ".join(cycle) + "}")

    return out


# --- document I/O -----------------------------------------------------------

_ID = {"type": "string"}
_TEXT = {"type": "string"}
_WEIGHT = {"anyOf": [{"type": "number"}, {"type": "string", "pattern": r"^\s*-?\d+\s*/\s*\d+\s*$"}]}
_ID_LIST = {"type": "array", "items": _ID}


def _obj(required: list[str], **props: Any) -> dict[str, Any]:
    return {
        "type": "object",
        "properties": props,
        "required": required,
        "additionalProperties": False,
    }


_TERM = _obj(["id", "name"], id=_ID, name=_TEXT, description=_TEXT)
_INDICATOR = _obj(
    ["id", "question", "respondent_role", "scale"],
    id=_ID,
    question=_TEXT,
    respondent_role={"enum": [r.value for r in Role]},
    scale={"enum": [s.value for s in Scale]},
    weight=_WEIGHT,
    allows_na={"type": "boolean"},
)
_ASPECT = _obj(
    ["id", "name", "indicators"],
    id=_ID,
    name=_TEXT,
    weight=_WEIGHT,
    indicators={"type": "array", "items": _INDICATOR},
)
_CONSTRUCT = _obj(
    ["id", "name", "aspects"],
    id=_ID,
    name=_TEXT,
    kind={"enum": [k.value for k in ConstructKind]},
    aspects={"type": "array", "items": _ASPECT},
)
_PRACTICE = _obj(
    ["id", "name"],
    id=_ID,
    name=_TEXT,
    objectives=_ID_LIST,
    prerequisites=_ID_LIST,
    required_characteristics={
        "type": "array",
        "items": _obj(["characteristic"], characteristic=_ID, weight=_WEIGHT),
    },
    note=_TEXT,
)

CATALOG_SCHEMA: dict[str, Any] = _obj(
    [],
    practices={"type": "array", "items": _PRACTICE},
    objectives={"type": "array", "items": _TERM},
    success_factors={"type": "array", "items": _CONSTRUCT},
    org_characteristics={"type": "array", "items": _CONSTRUCT},
    system_characteristics={"type": "array", "items": _TERM},
    qualities={"type": "array", "items": _TERM},
    conflict_rules={
        "type": "array",
        "items": _obj(["practice", "characteristic", "rationale"], practice=_ID, characteristic=_ID, rationale=_TEXT),
    },
    preclusion_rules={
        "type": "array",
        "items": _obj(["practice", "quality", "rationale"], practice=_ID, quality=_ID, rationale=_TEXT),
    },
)


def read_json(source: bytes | str | IO[Any]) -> Any:
    """Parse a UTF-8 JSON document, keeping decimals exact."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not valid UTF-8: {exc}") from None
    try:
        return json.loads(source, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _schema_violations(doc: Any) -> list[Violation]:
    validator = jsonschema.Draft202012Validator(CATALOG_SCHEMA)
    out = []
    for err in sorted(validator.iter_errors(doc), key=lambda e: [str(p) for p in e.absolute_path]):
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        out.append(Violation(ViolationKind.SCHEMA, path, err.message))
    return out


def _construct(raw: Mapping[str, Any], default_kind: ConstructKind) -> MeasuredConstruct:
    return MeasuredConstruct(
        id=raw["id"],
        name=raw["name"],
        kind=ConstructKind(raw.get("kind", default_kind.value)),
        aspects=tuple(
            Aspect(
                id=a["id"],
                name=a["name"],
                weight=as_fraction(a.get("weight", 1)),
                indicators=tuple(
                    Indicator(
                        id=i["id"],
                        question=i["question"],
                        respondent_role=Role(i["respondent_role"]),
                        scale=Scale(i["scale"]),
                        weight=as_fraction(i.get("weight", 1)),
                        allows_na=i.get("allows_na", False),
                    )
                    for i in a["indicators"]
                ),
            )
            for a in raw["aspects"]
        ),
    )


def catalog_from_dict(doc: Mapping[str, Any]) -> Catalog:
    """Build an *unvalidated* Catalog from a parsed document.

    Raises ValidationError if the document does not match the schema.
    """
    schema_errors = _schema_violations(doc)
    if schema_errors:
        raise ValidationError(schema_errors)
    terms = lambda key: tuple(  # noqa: E731
        Term(t["id"], t["name"], t.get("description", "")) for t in doc.get(key, [])
    )
    return Catalog(
        practices=tuple(
            AgilePractice(
                id=p["id"],
                name=p["name"],
                objectives=frozenset(p.get("objectives", [])),
                prerequisites=frozenset(p.get("prerequisites", [])),
                required_characteristics=tuple(
                    RequiredCharacteristic(r["characteristic"], as_fraction(r.get("weight", 1)))
                    for r in p.get("required_characteristics", [])
                ),
                note=p.get("note", ""),
            )
            for p in doc.get("practices", [])
        ),
        objectives=terms("objectives"),
        success_factors=tuple(
            _construct(c, ConstructKind.SUCCESS_FACTOR) for c in doc.get("success_factors", [])
        ),
        org_characteristics=tuple(
            _construct(c, ConstructKind.ORG_CHARACTERISTIC) for c in doc.get("org_characteristics", [])
        ),
        system_characteristics=terms("system_characteristics"),
        qualities=terms("qualities"),
        conflict_rules=tuple(
            ConflictRule(r["practice"], r["characteristic"], r["rationale"])
            for r in doc.get("conflict_rules", [])
        ),
        preclusion_rules=tuple(
            PreclusionRule(r["practice"], r["quality"], r["rationale"])
            for r in doc.get("preclusion_rules", [])
        ),
    )


def load_catalog(source: bytes | str | IO[Any]) -> Catalog:
    """Parse and fully validate a catalog document.

    Raises ParseError for malformed JSON and ValidationError listing every
    violation otherwise.
    """
    catalog = catalog_from_dict(read_json(source))
    violations = validate_catalog(catalog)
    if violations:
        raise ValidationError(violations)
    return catalog


def _term_dict(term: Term) -> dict[str, Any]:
    out = {"id": term.id, "name": term.name}
    if term.description:
        out["description"] = term.description
    return out


def _construct_dict(c: MeasuredConstruct) -> dict[str, Any]:
    return {
        "id": c.id,
        "name": c.name,
        "kind": c.kind.value,
        "aspects": [
            {
                "id": a.id,
                "name": a.name,
                "weight": rational_to_json(a.weight),
                "indicators": [
                    {
                        "id": i.id,
                        "question": i.question,
                        "respondent_role": i.respondent_role.value,
                        "scale": i.scale.value,
                        "weight": rational_to_json(i.weight),
                        "allows_na": i.allows_na,
                    }
                    for i in a.indicators
                ],
            }
            for a in c.aspects
        ],
    }


def catalog_to_dict(catalog: Catalog) -> dict[str, Any]:
    practices = []
    for p in catalog.practices:
        entry: dict[str, Any] = {
            "id": p.id,
            "name": p.name,
            "objectives": sorted(p.objectives),
            "prerequisites": sorted(p.prerequisites),
            "required_characteristics": [
                {"characteristic": r.characteristic, "weight": rational_to_json(r.weight)}
                for r in p.required_characteristics
            ],
        }
        if p.note:
            entry["note"] = p.note
        practices.append(entry)
    return {
        "practices": practices,
        "objectives": [_term_dict(t) for t in catalog.objectives],
        "success_factors": [_construct_dict(c) for c in catalog.success_factors],
        "org_characteristics": [_construct_dict(c) for c in catalog.org_characteristics],
        "system_characteristics": [_term_dict(t) for t in catalog.system_characteristics],
        "qualities": [_term_dict(t) for t in catalog.qualities],
        "conflict_rules": [
            {"practice": r.practice, "characteristic": r.characteristic, "rationale": r.rationale}
            for r in catalog.conflict_rules
        ],
        "preclusion_rules": [
            {"practice": r.practice, "quality": r.quality, "rationale": r.rationale}
            for r in catalog.preclusion_rules
        ],
    }


def dump_catalog(catalog: Catalog) -> str:
    return json.dumps(catalog_to_dict(catalog), indent=2, ensure_ascii=False) + "\n"


def seed_catalog_text() -> str:
    return resources.files("agilegate").joinpath("data/seed.json").read_text(encoding="utf-8")


def load_seed_catalog() -> Catalog:
    """The catalog shipped with the package (practices and rules from the method's worked examples)."""
    return load_catalog(seed_catalog_text())
