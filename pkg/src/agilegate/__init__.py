"""agilegate: decide which agile practices a critical-systems organization can adopt.

The decision runs in three stages: a Go/No-go gate on success factors, a
suitability filter against system characteristics and desired qualities, and
a dependency-aware readiness assessment that yields an ordered adoption plan.
"""

__version__ = "0.1.0"

from .catalog import Catalog, load_catalog, load_seed_catalog, transitive_prerequisites, validate_catalog
from .gating import GatePolicy, Verdict, decide_go_nogo
from .pipeline import DecisionReport, PipelineInputs, run_pipeline
from .readiness import (
    AdoptionObjectives,
    ReadinessPolicy,
    assess_readiness,
    build_adoption_plan,
    select_candidates,
    what_if,
)
from .report import parse_machine_report, render_report
from .scoring import ResponseSet, construct_degree
from .suitability import ProjectProfile, evaluate_practice_suitability, filter_practices

__all__ = [
    "AdoptionObjectives",
    "Catalog",
    "DecisionReport",
    "GatePolicy",
    "PipelineInputs",
    "ProjectProfile",
    "ReadinessPolicy",
    "ResponseSet",
    "Verdict",
    "assess_readiness",
    "build_adoption_plan",
    "construct_degree",
    "decide_go_nogo",
    "evaluate_practice_suitability",
    "filter_practices",
    "load_catalog",
    "load_seed_catalog",
    "parse_machine_report",
    "render_report",
    "run_pipeline",
    "select_candidates",
    "transitive_prerequisites",
    "validate_catalog",
    "what_if",
]
