"""Discard practices that clash with the system being built.

A practice is discarded when any conflict rule pairs it with a characteristic
in the project profile, or any preclusion rule pairs it with a desired quality.
Only explicit rules count; a missing rule means no conflict.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from typing import IO, Any

from .catalog import Catalog, read_json
from .errors import AgileGateError, InputError, UnknownProfileId


class Status(str, enum.Enum):
    SUITABLE = "Suitable"
    DISCARDED = "Discarded"


class RuleKind(str, enum.Enum):
    CONFLICT = "conflict"
    PRECLUSION = "preclusion"


@dataclass(frozen=True)
class ProjectProfile:
    characteristics: frozenset[str] = frozenset()
    qualities: frozenset[str] = frozenset()
    name: str = ""


@dataclass(frozen=True)
class Reason:
    """One matched rule: ``target`` is a system characteristic or a quality."""

    kind: RuleKind
    target: str
    rationale: str

    def describe(self) -> str:
        verb = "conflicts with" if self.kind is RuleKind.CONFLICT else "precludes"
        return f"{verb} {self.target}: {self.rationale}"


@dataclass(frozen=True)
class SuitabilityVerdict:
    practice: str
    status: Status
    reasons: tuple[Reason, ...] = ()


def check_profile(catalog: Catalog, profile: ProjectProfile) -> None:
    unknown = sorted(profile.characteristics - catalog.system_characteristic_ids)
    unknown += sorted(profile.qualities - catalog.quality_ids)
    if unknown:
        raise UnknownProfileId(f"profile {profile.name!r} names unknown ids {unknown}")


def evaluate_practice_suitability(
    catalog: Catalog, profile: ProjectProfile, practice: str
) -> SuitabilityVerdict:
    catalog.practice(practice)
    check_profile(catalog, profile)
    reasons = [
        Reason(RuleKind.CONFLICT, rule.characteristic, rule.rationale)
        for rule in catalog.conflict_rules
        if rule.practice == practice and rule.characteristic in profile.characteristics
    ]
    reasons += [
        Reason(RuleKind.PRECLUSION, rule.quality, rule.rationale)
        for rule in catalog.preclusion_rules
        if rule.practice == practice and rule.quality in profile.qualities
    ]
    reasons.sort(key=lambda r: (r.kind.value, r.target))
    status = Status.DISCARDED if reasons else Status.SUITABLE
    return SuitabilityVerdict(practice, status, tuple(reasons))


def filter_practices(
    catalog: Catalog, profile: ProjectProfile, practices: Iterable[str]
) -> dict[str, SuitabilityVerdict]:
    """One verdict per practice, keyed and ordered by practice id."""
    out = {}
    for practice in sorted(set(practices)):
        try:
            out[practice] = evaluate_practice_suitability(catalog, profile, practice)
        except AgileGateError as exc:
            raise exc.add_context("practice", practice)
    return out


def suitable_set(verdicts: Mapping[str, SuitabilityVerdict]) -> frozenset[str]:
    return frozenset(p for p, v in verdicts.items() if v.status is Status.SUITABLE)


def profile_from_dict(doc: Any) -> ProjectProfile:
    if not isinstance(doc, Mapping) or set(doc) - {"name", "characteristics", "qualities"}:
        raise InputError("profile must be an object with 'name', 'characteristics', 'qualities'")
    chars, quals = doc.get("characteristics", []), doc.get("qualities", [])
    if not isinstance(chars, list) or not isinstance(quals, list):
        raise InputError("profile 'characteristics' and 'qualities' must be lists")
    return ProjectProfile(frozenset(map(str, chars)), frozenset(map(str, quals)), str(doc.get("name", "")))


def profile_to_dict(profile: ProjectProfile) -> dict[str, Any]:
    return {
        "name": profile.name,
        "characteristics": sorted(profile.characteristics),
        "qualities": sorted(profile.qualities),
    }


def load_profile(source: bytes | str | IO[Any]) -> ProjectProfile:
    return profile_from_dict(read_json(source))
