"""Turn questionnaire answers into degrees of presence.

Answers are normalized to [0, 1] (binary yes/no -> 1/0, five-level ordinal
``k`` -> ``k/4``), averaged across respondents, then combined by weighted mean
per aspect and per construct. Not-applicable answers are excluded and the
remaining weights renormalized; they never count as zero.

Degrees are exact :class:`~fractions.Fraction` values. ``None`` is the
not-applicable marker returned by the indicator-level functions.
"""

from __future__ import annotations

import enum
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import IO, Any, Union

from .catalog import Aspect, Catalog, Indicator, MeasuredConstruct, Role, Scale, read_json
from .errors import (
    AgileGateError,
    InputError,
    MissingAnswer,
    NoUsableAnswers,
    NotApplicableDisallowed,
    RoleMismatch,
    ScaleMismatch,
)

log = logging.getLogger(__name__)


class NotApplicable(enum.Enum):
    NA = "na"

    def __repr__(self) -> str:
        return "NOT_APPLICABLE"


NOT_APPLICABLE = NotApplicable.NA

# bool -> binary yes/no, int 0..4 -> ordinal level
AnswerValue = Union[bool, int, NotApplicable]


class Mode(str, enum.Enum):
    STRICT = "strict"
    LENIENT = "lenient"


@dataclass(frozen=True)
class Response:
    indicator: str
    answer: AnswerValue
    respondent_role: Role
    respondent_id: str = ""


@dataclass(frozen=True)
class ResponseSet:
    responses: tuple[Response, ...] = ()
    mode: Mode = Mode.STRICT

    @cached_property
    def by_indicator(self) -> dict[str, list[Response]]:
        grouped: dict[str, list[Response]] = {}
        for r in self.responses:
            grouped.setdefault(r.indicator, []).append(r)
        return grouped

    def for_indicator(self, indicator_id: str) -> list[Response]:
        return self.by_indicator.get(indicator_id, [])


def weighted_mean(pairs: Iterable[tuple[Fraction, Fraction]]) -> Fraction:
    """Mean of ``(weight, value)`` pairs; weights need not sum to one."""
    total_weight = Fraction(0)
    total = Fraction(0)
    for weight, value in pairs:
        total_weight += weight
        total += weight * value
    if total_weight == 0:
        raise ValueError("weighted mean of nothing")
    return total / total_weight


def normalize_answer(indicator: Indicator, answer: AnswerValue) -> Fraction | None:
    """Map one answer onto [0, 1]; ``None`` means not applicable."""
    if answer is NOT_APPLICABLE:
        if not indicator.allows_na:
            raise NotApplicableDisallowed(f"indicator {indicator.id!r} does not accept 'na'")
        return None
    if indicator.scale is Scale.BINARY:
        if not isinstance(answer, bool):
            raise ScaleMismatch(f"indicator {indicator.id!r} expects yes/no, got {answer!r}")
        return Fraction(int(answer))
    if isinstance(answer, bool) or not isinstance(answer, int):
        raise ScaleMismatch(f"indicator {indicator.id!r} expects a level 0..4, got {answer!r}")
    if not 0 <= answer <= 4:
        raise ScaleMismatch(f"indicator {indicator.id!r}: level {answer} outside 0..4")
    return Fraction(answer, 4)


def aggregate_indicator_responses(
    indicator: Indicator,
    responses: Sequence[Response],
    mode: Mode = Mode.STRICT,
) -> Fraction | None:
    """Arithmetic mean over respondents, ignoring not-applicable answers.

    Returns ``None`` when every answer is not applicable. Raises
    MissingAnswer for an empty list. A response from the wrong role is an
    error in strict mode and a logged warning in lenient mode.
    """
    if not responses:
        raise MissingAnswer(f"no answer for indicator {indicator.id!r}")
    scores = []
    for response in responses:
        if response.indicator != indicator.id:
            raise ValueError(f"response for {response.indicator!r} passed with {indicator.id!r}")
        if response.respondent_role != indicator.respondent_role:
            msg = (
                f"indicator {indicator.id!r} is answered by {indicator.respondent_role.value}, "
                f"got {response.respondent_role.value} ({response.respondent_id or 'anonymous'})"
            )
            if mode is Mode.STRICT:
                raise RoleMismatch(msg)
            log.warning(msg)
        score = normalize_answer(indicator, response.answer)
        if score is not None:
            scores.append(score)
    if not scores:
        return None
    return sum(scores, Fraction(0)) / len(scores)


def aspect_score(aspect: Aspect, response_set: ResponseSet) -> Fraction:
    pairs = []
    for indicator in aspect.indicators:
        responses = response_set.for_indicator(indicator.id)
        if not responses and response_set.mode is Mode.LENIENT:
            continue
        try:
            score = aggregate_indicator_responses(indicator, responses, response_set.mode)
        except AgileGateError as exc:
            raise exc.add_context("indicator", indicator.id)
        if score is not None:
            pairs.append((indicator.weight, score))
    if not pairs:
        raise NoUsableAnswers(f"aspect {aspect.id!r} has no applicable answers")
    return weighted_mean(pairs)


def construct_degree(construct: MeasuredConstruct, response_set: ResponseSet) -> Fraction:
    """Degree of presence of a success factor or organizational characteristic."""
    pairs = []
    for aspect in construct.aspects:
        try:
            pairs.append((aspect.weight, aspect_score(aspect, response_set)))
        except AgileGateError as exc:
            raise exc.add_context("aspect", aspect.id).add_context("construct", construct.id)
    return weighted_mean(pairs)


def factor_degrees(catalog: Catalog, response_set: ResponseSet) -> dict[str, Fraction]:
    return {f.id: construct_degree(f, response_set) for f in catalog.success_factors}


# --- responses document -----------------------------------------------------

_ANSWER_WORDS = {"yes": True, "no": False, "na": NOT_APPLICABLE}


def parse_answer(raw: Any) -> AnswerValue:
    if isinstance(raw, str) and raw in _ANSWER_WORDS:
        return _ANSWER_WORDS[raw]
    if isinstance(raw, int) and not isinstance(raw, bool):
        return raw
    raise InputError(f"answer must be 'yes', 'no', 'na' or an integer 0..4, got {raw!r}")


def answer_to_json(answer: AnswerValue) -> str | int:
    if answer is NOT_APPLICABLE:
        return "na"
    if isinstance(answer, bool):
        return "yes" if answer else "no"
    return answer


def responses_from_dict(doc: Any) -> ResponseSet:
    if not isinstance(doc, Mapping) or set(doc) - {"mode", "responses"}:
        raise InputError("responses document must be an object with 'mode' and 'responses'")
    try:
        mode = Mode(doc.get("mode", "strict"))
    except ValueError:
        raise InputError(f"unknown responses mode {doc.get('mode')!r}") from None
    items = doc.get("responses", [])
    if not isinstance(items, list):
        raise InputError("'responses' must be a list")
    out = []
    for n, item in enumerate(items):
        if not isinstance(item, Mapping) or not {"indicator", "answer", "respondent_role"} <= set(item):
            raise InputError(f"response #{n} needs indicator, answer and respondent_role")
        extra = set(item) - {"indicator", "answer", "respondent_role", "respondent_id"}
        if extra:
            raise InputError(f"response #{n} has unknown keys {sorted(extra)}")
        try:
            role = Role(item["respondent_role"])
        except ValueError:
            raise InputError(f"response #{n}: unknown role {item['respondent_role']!r}") from None
        out.append(
            Response(
                indicator=str(item["indicator"]),
                answer=parse_answer(item["answer"]),
                respondent_role=role,
                respondent_id=str(item.get("respondent_id", "")),
            )
        )
    return ResponseSet(tuple(out), mode)


def responses_to_dict(response_set: ResponseSet) -> dict[str, Any]:
    return {
        "mode": response_set.mode.value,
        "responses": [
            {
                "indicator": r.indicator,
                "answer": answer_to_json(r.answer),
                "respondent_role": r.respondent_role.value,
                "respondent_id": r.respondent_id,
            }
            for r in response_set.responses
        ],
    }


def load_responses(source: bytes | str | IO[Any]) -> ResponseSet:
    return responses_from_dict(read_json(source))


def check_responses(catalog: Catalog, response_set: ResponseSet) -> list[str]:
    """Problems that make a response set unusable with this catalog.

    Covers unknown indicators, answers of the wrong scale, disallowed
    not-applicable answers and (strict mode only) wrong respondent roles.
    """
    problems = []
    for n, r in enumerate(response_set.responses):
        indicator = catalog.indicator_map.get(r.indicator)
        if indicator is None:
            problems.append(f"response #{n}: unknown indicator {r.indicator!r}")
            continue
        try:
            normalize_answer(indicator, r.answer)
        except AgileGateError as exc:
            problems.append(f"response #{n}: {exc}")
        if response_set.mode is Mode.STRICT and r.respondent_role != indicator.respondent_role:
            problems.append(
                f"response #{n}: indicator {r.indicator!r} is answered by "
                f"{indicator.respondent_role.value}, not {r.respondent_role.value}"
            )
    return problems
