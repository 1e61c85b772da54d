"""Comparative similarity logic toolkit: parser, models, tableau prover,
countermodel extraction and a brute-force cross-check oracle."""

from .formula import (
    And,
    Atom,
    Bottom,
    BOTTOM,
    Cond,
    Formula,
    Not,
    ParseError,
    Sim,
    TOP,
    cond_to_csl,
    csl_to_cond,
    measures,
    parse,
    print_formula,
)
from .modelext import ExtractionReport, extract
from .semantics import (
    DistanceMinspaceModel,
    ModelError,
    PreferentialModel,
    SatVerdict,
    dist_to_pref,
    enumerate_models,
    eval_box,
    eval_dist,
    eval_pref,
    model_from_obj,
    model_to_obj,
    oracle_sat,
    pref_to_dist,
)
from .tableau import (
    ENGINE_BACKEND,
    BoxAt,
    BoxU,
    Label,
    Labelled,
    Pref,
    ResourceLimitExceeded,
    TableauSet,
    Verdict,
    applicable_dynamic,
    applicable_static,
    apply,
    decide,
    is_closed,
    is_saturated,
)

__version__ = "0.1.0"

__all__ = [
    "And", "Atom", "Bottom", "BOTTOM", "Cond", "Formula", "Not", "ParseError",
    "Sim", "TOP", "cond_to_csl", "csl_to_cond", "measures", "parse",
    "print_formula", "ExtractionReport", "extract", "DistanceMinspaceModel",
    "ModelError", "PreferentialModel", "SatVerdict", "dist_to_pref",
    "enumerate_models", "eval_box", "eval_dist", "eval_pref",
    "model_from_obj", "model_to_obj", "oracle_sat", "pref_to_dist",
    "ENGINE_BACKEND", "BoxAt", "BoxU", "Label", "Labelled", "Pref",
    "ResourceLimitExceeded", "TableauSet", "Verdict", "applicable_dynamic",
    "applicable_static", "apply", "decide", "is_closed", "is_saturated",
    "__version__",
]
