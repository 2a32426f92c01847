"""Go/No-go decision over success-factor degrees of presence.

A factor passes when its degree is at or above its threshold. The boundary is
closed on purpose: a degree exactly equal to the threshold passes.
"""

from __future__ import annotations

import enum
from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ._numbers import Number, as_fraction, rational_to_json
from .errors import EmptyFactorSet, InputError

DEFAULT_THRESHOLD = Fraction(4, 5)

BOUNDARY_NOTE = (
    "closed threshold: a success factor passes when its degree of presence is "
    "greater than or equal to its threshold"
)


class Verdict(str, enum.Enum):
    GO = "Go"
    NO_GO = "NoGo"


@dataclass(frozen=True)
class GatePolicy:
    default_threshold: Fraction = DEFAULT_THRESHOLD
    overrides: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "default_threshold", as_fraction(self.default_threshold))
        object.__setattr__(
            self, "overrides", {k: as_fraction(v) for k, v in sorted(self.overrides.items())}
        )
        for key, t in (("default", self.default_threshold), *self.overrides.items()):
            if not 0 <= t <= 1:
                raise InputError(f"gate threshold for {key} must be in [0, 1], got {t}")

    def threshold_for(self, factor: str) -> Fraction:
        return self.overrides.get(factor, self.default_threshold)


@dataclass(frozen=True)
class FactorResult:
    factor: str
    degree: Fraction
    threshold: Fraction
    passed: bool
    margin: Fraction


@dataclass(frozen=True)
class GateDecision:
    verdict: Verdict
    factor_results: tuple[FactorResult, ...]

    @property
    def failing(self) -> list[FactorResult]:
        return [r for r in self.factor_results if not r.passed]


def decide_go_nogo(degrees: Mapping[str, Number], policy: GatePolicy | None = None) -> GateDecision:
    """Go iff every factor's degree meets its threshold.

    Results list failing factors first, then passing ones, each group ordered
    by factor id.
    """
    policy = policy or GatePolicy()
    if not degrees:
        raise EmptyFactorSet("no success factors to assess")
    results = []
    for factor, raw in degrees.items():
        degree = as_fraction(raw)
        threshold = policy.threshold_for(factor)
        results.append(
            FactorResult(
                factor=factor,
                degree=degree,
                threshold=threshold,
                passed=degree >= threshold,
                margin=degree - threshold,
            )
        )
    results.sort(key=lambda r: (r.passed, r.factor))
    verdict = Verdict.GO if all(r.passed for r in results) else Verdict.NO_GO
    return GateDecision(verdict, tuple(results))


def gate_policy_from_dict(doc: Any) -> GatePolicy:
    if doc is None:
        return GatePolicy()
    if not isinstance(doc, Mapping) or set(doc) - {"default_threshold", "overrides"}:
        raise InputError("gate policy must be an object with 'default_threshold' and/or 'overrides'")
    overrides = doc.get("overrides", {})
    if not isinstance(overrides, Mapping):
        raise InputError("gate 'overrides' must map factor ids to thresholds")
    try:
        return GatePolicy(
            as_fraction(doc.get("default_threshold", DEFAULT_THRESHOLD)),
            {str(k): as_fraction(v) for k, v in overrides.items()},
        )
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad gate threshold: {exc}") from None


def gate_policy_to_dict(policy: GatePolicy) -> dict[str, Any]:
    return {
        "default_threshold": rational_to_json(policy.default_threshold),
        "overrides": {k: rational_to_json(v) for k, v in policy.overrides.items()},
    }
