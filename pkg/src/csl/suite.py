"""Test-content generator and cross-check harness.

Axiom and derived-theorem schemata instantiated over an exhaustive little
formula corpus, checked three ways against each other: the tableau engine,
the brute-force model-enumeration oracle, and countermodel extraction plus
the evaluator.  A disagreement anywhere is a bug in one of the routes, and
the harness exists to make such disagreements loud.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .formula import (
    BOTTOM,
    TOP,
    And,
    Atom,
    Bottom,
    Cond,
    Formula,
    Not,
    Sim,
    limp,
    lor,
    print_formula,
)
from .modelext import extract
from .semantics import (
    PreferentialModel,
    extension,
    oracle_sat,
)
from .tableau import ResourceLimitExceeded, decide

A, B, C = Atom("A"), Atom("B"), Atom("C")


@dataclass(frozen=True)
class Schema:
    """A named template over metavariable atoms A, B, C.

    ``kind`` is "axiom" for object-level validity obligations and "rule"
    for the two derived closure rules, whose premise template must be valid
    before the conclusion template is required to be."""

    name: str
    template: Formula
    metavars: tuple
    kind: str = "axiom"
    premise: Optional[Formula] = None

    @property
    def arity(self) -> int:
        return len(self.metavars)


def axiom_schemata() -> list:
    """The axioms, the derived theorems (the two schema families taken at
    width two), and the two rule obligations."""
    ax = [
        Schema("Ax1", lor(Not(Sim(A, B)), Not(Sim(B, A))), ("A", "B")),
        Schema("Ax2", limp(Sim(A, B), lor(Sim(A, C), Sim(C, B))), ("A", "B", "C")),
        Schema("Ax3", limp(And(A, Not(B)), Sim(A, B)), ("A", "B")),
        Schema("Ax4", limp(Sim(A, B), Not(B)), ("A", "B")),
        Schema(
            "Ax5",
            limp(And(Sim(A, B), Sim(A, C)), Sim(A, lor(B, C))),
            ("A", "B", "C"),
        ),
        Schema(
            "Ax6",
            limp(Sim(A, BOTTOM), Not(Sim(Not(Sim(A, BOTTOM)), BOTTOM))),
            ("A",),
        ),
        Schema("T1", limp(A, Sim(A, BOTTOM)), ("A",)),
        Schema("T2", Not(Sim(A, A)), ("A",)),
        Schema("T3", Not(Sim(A, TOP)), ("A",)),
        Schema("T4", limp(Sim(Sim(A, BOTTOM), BOTTOM), Sim(A, BOTTOM)), ("A",)),
        Schema("T5", limp(And(Sim(A, B), Sim(B, C)), Sim(A, C)), ("A", "B", "C")),
        Schema(
            "T6",
            limp(And(Sim(A, B), Sim(A, C)), Sim(A, lor(B, C))),
            ("A", "B", "C"),
        ),
        Schema(
            "T7",
            limp(
                And(Sim(A, B), Sim(A, C)),
                Sim(And(And(A, Not(B)), Not(C)), lor(B, C)),
            ),
            ("A", "B", "C"),
        ),
        Schema(
            "Mon",
            limp(Sim(A, C), Sim(B, C)),
            ("A", "B", "C"),
            kind="rule",
            premise=limp(A, B),
        ),
        Schema(
            "R1",
            limp(Sim(C, B), Sim(C, A)),
            ("A", "B", "C"),
            kind="rule",
            premise=limp(A, B),
        ),
    ]
    return ax


def instantiate(template: Formula, subst: dict) -> Formula:
    """Substitute formulas for metavariable atoms, capture-free."""
    if isinstance(template, Atom):
        return subst.get(template.name, template)
    if isinstance(template, Bottom):
        return template
    if isinstance(template, Not):
        return Not(instantiate(template.arg, subst))
    if isinstance(template, And):
        return And(
            instantiate(template.left, subst), instantiate(template.right, subst)
        )
    if isinstance(template, Sim):
        return Sim(
            instantiate(template.left, subst), instantiate(template.right, subst)
        )
    if isinstance(template, Cond):
        return Cond(
            instantiate(template.left, subst), instantiate(template.right, subst)
        )
    raise TypeError(f"not a formula: {template!r}")


# ---------------------------------------------------------------------------
# corpus


@dataclass(frozen=True)
class CorpusSpec:
    atoms: tuple
    max_size: int
    max_sim_depth: int


def generate_corpus(spec: CorpusSpec) -> list:
    """Exactly the formulas within the size and nesting bounds, in a
    deterministic order (by size, then construction order)."""
    leaves = [Atom(a) for a in sorted(spec.atoms)] + [BOTTOM]
    by_size = {1: [(f, 0) for f in leaves]}
    for n in range(2, spec.max_size + 1):
        layer = []
        for f, d in by_size[n - 1]:
            layer.append((Not(f), d))
        for i in range(1, n - 1):
            j = n - 1 - i
            for fl, dl in by_size[i]:
                for fr, dr in by_size[j]:
                    layer.append((And(fl, fr), max(dl, dr)))
                    sd = max(dl, dr) + 1
                    if sd <= spec.max_sim_depth:
                        layer.append((Sim(fl, fr), sd))
        by_size[n] = layer
    out = []
    for n in range(1, spec.max_size + 1):
        out.extend(f for f, _d in by_size[n])
    return out


def count_corpus(n_leaves: int, max_size: int) -> int:
    """Independent recurrence for the unconstrained corpus size."""
    t = {1: n_leaves}
    for n in range(2, max_size + 1):
        t[n] = t[n - 1] + 2 * sum(t[i] * t[n - 1 - i] for i in range(1, n - 1))
    return sum(t[n] for n in range(1, max_size + 1))


# ---------------------------------------------------------------------------
# model-side sweeps


def schema_model_failures(
    schemata: Sequence[Schema],
    meta_corpus: Sequence[Formula],
    models: Iterable[PreferentialModel],
) -> list:
    """Axiom instances that fail to hold at some world of some model.

    Instances whose metavariables receive extensionally identical formulas
    evaluate identically, so each model is swept once per distinct
    extension tuple rather than once per instance.
    """
    failures = []
    axioms = [s for s in schemata if s.kind == "axiom"]
    for m in models:
        memo = {}
        exts = [extension(m, f, memo) for f in meta_corpus]
        distinct = {}
        for f, e in zip(meta_corpus, exts):
            distinct.setdefault(e, f)
        ext_reps = sorted(distinct.items(), key=lambda kv: sorted(kv[0]))
        nw = len(m.worlds)
        for schema in axioms:
            k = schema.arity
            stack = [()]
            for _ in range(k):
                stack = [t + (er,) for t in stack for er in ext_reps]
            for combo in stack:
                local = {Atom(v): e for v, (e, _f) in zip(schema.metavars, combo)}
                if len(extension(m, schema.template, dict(local))) != nw:
                    failures.append(
                        (
                            schema.name,
                            {v: f for v, (_e, f) in zip(schema.metavars, combo)},
                            m,
                        )
                    )
    return failures


def rule_model_failures(
    schemata: Sequence[Schema],
    meta_corpus: Sequence[Formula],
    models: Sequence[PreferentialModel],
) -> list:
    """Closure-rule obligations: wherever the premise A -> B is valid in
    every model, the conclusion instance must be too.

    Premise validity reduces to an extension inclusion per model, and the
    conclusion's validity depends only on extension tuples, so both sides
    are swept with per-model memo tables.
    """
    failures = []
    rules = [s for s in schemata if s.kind == "rule"]
    if not rules:
        return failures
    models = list(models)
    ext_per_model = []
    for m in models:
        memo = {}
        ext_per_model.append({f: extension(m, f, memo) for f in meta_corpus})
    valid_pairs = [
        (fa, fb)
        for fa in meta_corpus
        for fb in meta_corpus
        if all(em[fa] <= em[fb] for em in ext_per_model)
    ]
    for schema in rules:
        tables = [dict() for _ in models]
        for fa, fb in valid_pairs:
            for fc in meta_corpus:
                ok = True
                for m, em, tbl in zip(models, ext_per_model, tables):
                    key = (em[fa], em[fb], em[fc])
                    v = tbl.get(key)
                    if v is None:
                        local = {A: em[fa], B: em[fb], C: em[fc]}
                        v = len(extension(m, schema.template, local)) == len(
                            m.worlds
                        )
                        tbl[key] = v
                    if not v:
                        ok = False
                        break
                if not ok:
                    failures.append(
                        (schema.name, {"A": fa, "B": fb, "C": fc})
                    )
    return failures


# ---------------------------------------------------------------------------
# engine-side sweeps


def prove_valid(f: Formula, label_cap: Optional[int] = None) -> bool:
    """Engine validity: the tableau for the negation closes."""
    return decide(Not(f), label_cap=label_cap).status == "CLOSED"


def _prove_batch(formulas):
    bad = []
    for f in formulas:
        if not prove_valid(f):
            bad.append(print_formula(f))
    return bad


def validity_sweep(formulas: Sequence[Formula], jobs: int = 1) -> list:
    """Prove each formula valid with the engine; returns the failures."""
    if jobs <= 1:
        return _prove_batch(formulas)
    chunks = [formulas[i::jobs] for i in range(jobs)]
    out = []
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        for part in ex.map(_prove_batch, chunks):
            out.extend(part)
    return out


# ---------------------------------------------------------------------------
# the three-way cross-check


@dataclass(frozen=True)
class CrosscheckReport:
    name: str
    formula: Formula
    verdict: str  # CLOSED | OPEN | INCONCLUSIVE
    oracle: str  # sat | none
    consistent: bool
    millis: float
    detail: str = ""

    def line(self) -> str:
        return (
            f"{self.name}, {print_formula(self.formula)}, {self.verdict}, "
            f"{self.oracle}, {str(self.consistent).lower()}, "
            f"{self.millis:.1f}"
        )


def crosscheck(
    f: Formula,
    oracle_bound: int,
    models: Optional[Sequence[PreferentialModel]] = None,
    label_cap: Optional[int] = None,
    name: str = "crosscheck",
) -> CrosscheckReport:
    """Run decide and the oracle on f and reconcile the outcomes.

    Flags an oracle-satisfiable formula whose tableau closed (soundness
    bug), an open tableau whose extracted model fails verification
    (completeness bug), and an extracted model small enough that the
    oracle should have found one but did not.
    """
    t0 = time.perf_counter()
    sat = oracle_sat(f, oracle_bound, models=models)
    try:
        verdict = decide(f, label_cap=label_cap)
    except ResourceLimitExceeded:
        millis = (time.perf_counter() - t0) * 1000.0
        return CrosscheckReport(
            name, f, "INCONCLUSIVE", "sat" if sat.satisfiable else "none",
            True, millis, "label cap hit",
        )
    consistent = True
    detail = ""
    if verdict.status == "CLOSED":
        if sat.satisfiable:
            consistent = False
            detail = "oracle found a model but the tableau closed"
    else:
        report = extract(verdict.open_set, verdict.open_set.root, f)
        if not report.verified:
            consistent = False
            detail = "extracted model fails verification"
        elif not sat.satisfiable and len(report.model.worlds) <= oracle_bound:
            consistent = False
            detail = (
                "extraction found a model within the oracle bound the "
                "oracle missed"
            )
    millis = (time.perf_counter() - t0) * 1000.0
    return CrosscheckReport(
        name,
        f,
        "CLOSED" if verdict.status == "CLOSED" else "OPEN",
        "sat" if sat.satisfiable else "none",
        consistent,
        millis,
        detail,
    )
