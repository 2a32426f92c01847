from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agilegate.catalog import (
    AgilePractice,
    Aspect,
    Catalog,
    ConflictRule,
    ConstructKind,
    Indicator,
    MeasuredConstruct,
    Role,
    Scale,
    Term,
    ViolationKind,
    catalog_to_dict,
    dump_catalog,
    load_catalog,
    load_seed_catalog,
    topological_order,
    transitive_prerequisites,
    validate_catalog,
)
from agilegate.errors import ParseError, UnknownPractice, ValidationError

from .conftest import ROOT
from .oracles import reachable
from .randgen import practice_catalog, random_dag_edges, random_ids

SEED_PRACTICES = {
    "minimal-documentation",
    "evolutionary-requirements",
    "automated-unit-tests",
    "daily-standup-meetings",
    "test-driven-development",
    "unit-testing",
    "continuous-integration",
    "pair-programming",
    "self-organizing-teams",
    "motivated-empowered-individuals",
    "collaborative-planning",
    "refactoring",
}


def kinds(violations):
    return [v.kind for v in violations]


def test_seed_practices(seed):
    assert set(seed.practice_map) == SEED_PRACTICES


def test_seed_is_valid(seed):
    assert validate_catalog(seed) == []


def test_repo_level_seed_matches_package_data(seed):
    assert load_catalog((ROOT / "catalog" / "seed.json").read_bytes()) == seed


def test_seed_entities(seed):
    assert {c.id for c in seed.system_characteristics} == {
        "high-product-complexity",
        "long-development-period",
        "large-application",
    }
    assert {q.id for q in seed.qualities} == {"safety", "reliability", "maintainability"}
    assert {f.id for f in seed.success_factors} == {"sufficient-funds", "executive-support"}
    funds = seed.factor_map["sufficient-funds"]
    assert [a.id for a in funds.aspects] == ["allocated-amount", "spending-freedom"]
    questions = [i.question for i in funds.indicators()]
    assert "Can the funds be spent towards any process improvement activity?" in questions
    planning = seed.practice("collaborative-planning")
    assert [r.characteristic for r in planning.required_characteristics] == [
        "collaborative-management-style",
        "management-buy-in",
        "transparency-of-management",
        "small-power-distance",
        "developer-buy-in",
    ]
    assert seed.practice("self-organizing-teams").prerequisites == {"motivated-empowered-individuals"}
    assert seed.practice("pair-programming").objectives == {"increase-product-quality", "lower-employee-turnover"}


def test_empty_document_is_valid_catalog():
    assert load_catalog(b'{"practices": [], "success_factors": []}') == Catalog()
    assert load_catalog(b"{}") == Catalog()


def test_malformed_json_reports_position():
    with pytest.raises(ParseError) as info:
        load_catalog(b'{\n  "practices": [\n}')
    assert info.value.line == 3


def test_unknown_key_is_a_violation():
    with pytest.raises(ValidationError) as info:
        load_catalog(b'{"practices": [{"id": "a", "name": "A", "colour": "red"}], "extra": 1}')
    assert kinds(info.value.violations) == [ViolationKind.SCHEMA, ViolationKind.SCHEMA]


def test_two_cycle_named():
    doc = {
        "practices": [
            {"id": "a", "name": "A", "prerequisites": ["b"]},
            {"id": "b", "name": "B", "prerequisites": ["a"]},
        ]
    }
    with pytest.raises(ValidationError) as info:
        load_catalog(json.dumps(doc))
    [violation] = info.value.violations
    assert violation.kind is ViolationKind.CYCLE
    assert violation.subject == "a,b"
    assert "{a, b}" in str(violation)


def _aspect(aid: str, indicators=()) -> Aspect:
    return Aspect(id=aid, name=aid, indicators=tuple(indicators))


def test_empty_aspect_reported():
    factor = MeasuredConstruct("f", "F", (_aspect("lonely"),), ConstructKind.SUCCESS_FACTOR)
    violations = validate_catalog(Catalog(success_factors=(factor,)))
    assert [(v.kind, v.subject) for v in violations] == [(ViolationKind.EMPTY_ASPECT, "lonely")]


def test_conflict_rule_with_unknown_characteristic():
    catalog = Catalog(
        practices=(AgilePractice("a", "A"),),
        conflict_rules=(ConflictRule("a", "nowhere", "because"),),
    )
    assert kinds(validate_catalog(catalog)) == [ViolationKind.DANGLING_REFERENCE]


def test_every_violation_collected():
    ind = Indicator("Bad_Id", "", Role.MANAGER, Scale.BINARY, weight=Fraction(0))
    catalog = Catalog(
        practices=(
            AgilePractice("a", "A", prerequisites=frozenset({"a", "ghost"}), objectives=frozenset({"x"})),
            AgilePractice("a", "A again"),
        ),
        success_factors=(
            MeasuredConstruct("f", "F", (_aspect("asp", [ind]),), ConstructKind.ORG_CHARACTERISTIC),
            MeasuredConstruct("g", "G", (), ConstructKind.SUCCESS_FACTOR),
        ),
        conflict_rules=(ConflictRule("a", "c", "r"), ConflictRule("a", "c", " ")),
        system_characteristics=(Term("c", "C"),),
    )
    found = set(kinds(validate_catalog(catalog)))
    assert found == {
        ViolationKind.DUPLICATE_ID,
        ViolationKind.INVALID_IDENTIFIER,
        ViolationKind.NON_POSITIVE_WEIGHT,
        ViolationKind.EMPTY_TEXT,
        ViolationKind.KIND_MISMATCH,
        ViolationKind.EMPTY_CONSTRUCT,
        ViolationKind.DANGLING_REFERENCE,
        ViolationKind.SELF_PREREQUISITE,
        ViolationKind.DUPLICATE_RULE,
    }


def test_indicator_ids_unique_across_construct_kinds():
    ind = Indicator("q", "Q?", Role.MANAGER, Scale.BINARY)
    catalog = Catalog(
        success_factors=(MeasuredConstruct("f", "F", (_aspect("a", [ind]),), ConstructKind.SUCCESS_FACTOR),),
        org_characteristics=(MeasuredConstruct("c", "C", (_aspect("b", [ind]),), ConstructKind.ORG_CHARACTERISTIC),),
    )
    assert kinds(validate_catalog(catalog)) == [ViolationKind.DUPLICATE_ID]


@pytest.mark.parametrize(
    "practice, expected",
    [
        ("test-driven-development", ["unit-testing"]),
        ("continuous-integration", ["automated-unit-tests"]),
        ("self-organizing-teams", ["motivated-empowered-individuals"]),
        ("daily-standup-meetings", []),
    ],
)
def test_seed_prerequisites(seed, practice, expected):
    assert transitive_prerequisites(seed, practice) == expected


def test_chain_order():
    catalog = practice_catalog({"a": {"b"}, "b": {"c"}, "c": set()})
    assert reachable({"a": {"b"}, "b": {"c"}, "c": set()}, "a") == {"b", "c"}
    assert transitive_prerequisites(catalog, "a") == ["c", "b"]


def test_lexicographic_tie_break():
    catalog = practice_catalog({"top": {"zeta", "alpha", "mid"}, "mid": set(), "zeta": set(), "alpha": set()})
    assert transitive_prerequisites(catalog, "top") == ["alpha", "mid", "zeta"]


def test_unknown_practice(seed):
    with pytest.raises(UnknownPractice):
        transitive_prerequisites(seed, "mob-programming")


def test_topological_order_rejects_cycle():
    catalog = practice_catalog({"a": {"b"}, "b": {"a"}})
    with pytest.raises(ValueError):
        topological_order(catalog, ["a", "b"])


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=10), st.randoms(use_true_random=False))
def test_closure_matches_reachability(n, rng):
    ids = random_ids(rng, n)
    edges = random_dag_edges(rng, ids)
    catalog = practice_catalog(edges)
    assert validate_catalog(catalog) == []
    for p in ids:
        got = transitive_prerequisites(catalog, p)
        assert p not in got
        assert len(got) == len(set(got))
        assert set(got) == reachable(edges, p)
        for pos, q in enumerate(got):
            assert edges[q] <= set(got[:pos])


def test_round_trip_seed(seed):
    assert load_catalog(dump_catalog(seed)) == seed


def test_round_trip_keeps_odd_weights():
    ind = Indicator("q", "Q?", Role.MANAGER, Scale.ORDINAL5, weight=Fraction(1, 3))
    aspect = Aspect("a", "A", (ind,), weight=Fraction(7, 10))
    catalog = Catalog(success_factors=(MeasuredConstruct("f", "F", (aspect,), ConstructKind.SUCCESS_FACTOR),))
    doc = catalog_to_dict(catalog)
    assert doc["success_factors"][0]["aspects"][0]["indicators"][0]["weight"] == "1/3"
    assert doc["success_factors"][0]["aspects"][0]["weight"] == 0.7
    assert load_catalog(dump_catalog(catalog)) == catalog


def test_decimal_weights_are_exact():
    doc = {
        "success_factors": [
            {
                "id": "f",
                "name": "F",
                "aspects": [
                    {
                        "id": "a",
                        "name": "A",
                        "weight": 0.1,
                        "indicators": [
                            {"id": "q", "question": "Q?", "respondent_role": "manager", "scale": "binary"}
                        ],
                    }
                ],
            }
        ]
    }
    catalog = load_catalog(json.dumps(doc))
    assert catalog.success_factors[0].aspects[0].weight == Fraction(1, 10)
    assert catalog.success_factors[0].aspects[0].indicators[0].weight == 1


def test_accepted_catalog_revalidates_clean():
    rng = random.Random(7)
    for _ in range(20):
        catalog = practice_catalog(random_dag_edges(rng, random_ids(rng, 6)))
        reloaded = load_catalog(dump_catalog(catalog))
        assert validate_catalog(reloaded) == []
