"""Countermodel extraction from open tableau sets saturated under blocking.

Blocking leaves two saturation clauses unfulfilled on blocked premises; the
three completion steps below repair them (adding preference statements for
box-subsumption blocks, closing preference gaps, and rebuilding the order
of a label that was subsumed by an older one as a re-centered copy of the
subsumer's order).  Extraction then reads the canonical model off the
completed set and always verifies it with the evaluator: a failed
verification is a bug surfaced, never silently accepted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .formula import Atom, Formula, Not
from .semantics import ModelError, PreferentialModel, eval_pref
from .tableau import BoxAt, BoxU, Label, Labelled, Pref, TableauSet

# How the positive boxes of the blocker are transferred when a blocked
# label's order is rebuilt.  "negated" copies v:[u]~A to v:[x]~A when x
# carries ~A (the transfer is then truth-preserving at the new center);
# "literal" demands A itself at x as printed in the source construction;
# "always" copies unconditionally.
BOX_COPY_MODE = "negated"


class ExtractionError(RuntimeError):
    """The open set violates an invariant extraction relies on."""


@dataclass(frozen=True)
class ExtractionReport:
    model: PreferentialModel
    root_world: str
    steps: tuple
    verified: bool


def _sorted(formulas):
    return sorted(formulas, key=str)


def _neg_boxes(g: TableauSet):
    for tf in _sorted(g.formulas):
        if isinstance(tf, BoxAt) and not tf.sign:
            yield tf


def _fboxx_fulfilled(g: TableauSet, tf: BoxAt) -> bool:
    """Saturation clause for z:~[x]~A: x:A present, or x:~A plus a minimal
    witness below z."""
    z, x, a = tf.x, tf.idx, tf.f
    if Labelled(x, a) in g.formulas:
        return True
    if Labelled(x, Not(a)) not in g.formulas:
        return False
    return any(
        Pref(y, x, z) in g.formulas and BoxAt(y, x, True, a) in g.formulas
        for y in g.labels
        if Labelled(y, a) in g.formulas
    )


def _pi_blocker(g: TableauSet, x: Label) -> Optional[Label]:
    """Oldest strictly older label whose plain formulas subsume x's."""
    px = g.pi(x)
    best = None
    for u in g.labels:
        if u.birth < x.birth and px <= g.pi(u):
            if best is None or u.birth < best.birth:
                best = u
    return best


def complete_step1(g: TableauSet) -> TableauSet:
    """Fulfil box-subsumption-blocked z:~[x]~A by linking the witness that
    the oldest blocker already has below itself."""
    adds = []
    for tf in _neg_boxes(g):
        z, x, a = tf.x, tf.idx, tf.f
        if _fboxx_fulfilled(g, tf):
            continue
        if _pi_blocker(g, x) is not None:
            continue  # rebuilt wholesale in step 3
        blockers = [
            v
            for v in g.labels
            if v.birth < z.birth
            and BoxAt(v, x, False, a) in g.formulas
            and g.box_plus(x, z) <= g.box_plus(x, v)
        ]
        if not blockers:
            raise ExtractionError(
                f"unfulfilled unblocked premise {tf}: the engine should "
                "have applied its rule"
            )
        u = min(blockers, key=lambda l: l.birth)
        witness = None
        for y in g.labels:
            if (
                Labelled(y, a) in g.formulas
                and BoxAt(y, x, True, a) in g.formulas
                and Pref(y, x, u) in g.formulas
            ):
                witness = y
                break
        if witness is None:
            raise ExtractionError(
                f"blocker {u} of {tf} has no witness: engine bug"
            )
        adds.append(Pref(witness, x, z))
    return g.with_formulas(adds) if adds else g


def complete_step2(g1: TableauSet) -> TableauSet:
    """Close preference gaps between labels with identical positive boxes
    so the modularity clause holds on the completed set."""
    labels = g1.labels
    bp = {}

    def boxp(x, y):
        key = (x, y)
        if key not in bp:
            bp[key] = g1.box_plus(x, y)
        return bp[key]

    adds = []
    for tf in _sorted(g1.formulas):
        if not isinstance(tf, Pref):
            continue
        y, x, z = tf.y, tf.idx, tf.z
        bz, by = boxp(x, z), boxp(x, y)
        if bz < by:
            for z0 in labels:
                # z0 = x would contradict centering together with x <_x y
                if z0 != x and z0 != z and boxp(x, z0) == bz:
                    adds.append(Pref(y, x, z0))
    return g1.with_formulas(adds) if adds else g1


def _blocked_targets(g2: TableauSet):
    """Labels whose order must be rebuilt: carriers of an unfulfilled
    similarity witness clause or, as index, of an unfulfilled box clause,
    subsumed by an older label."""
    targets = {}

    def mark(x):
        u = _pi_blocker(g2, x)
        if u is None:
            raise ExtractionError(
                f"unfulfilled premise at {x} without an older subsumer: "
                "engine bug"
            )
        targets[x] = u

    from .formula import Sim

    for tf in _sorted(g2.formulas):
        if isinstance(tf, Labelled) and isinstance(tf.f, Not):
            inner = tf.f.arg
            if isinstance(inner, Sim):
                x, a, b = tf.x, inner.left, inner.right
                if (
                    Labelled(x, Not(a)) in g2.formulas
                    and Labelled(x, Not(b)) in g2.formulas
                    and not any(
                        Labelled(y, b) in g2.formulas
                        and BoxAt(y, x, True, a) in g2.formulas
                        for y in g2.labels
                    )
                ):
                    mark(x)
        elif isinstance(tf, BoxAt) and not tf.sign:
            if not _fboxx_fulfilled(g2, tf):
                mark(tf.idx)
    return targets


def complete_step3(g2: TableauSet) -> TableauSet:
    """Rebuild the order of every still-blocked label as a copy of its
    oldest subsumer's order, re-centered on the blocked label."""
    targets = _blocked_targets(g2)
    if not targets:
        return g2
    labels = g2.labels
    removed = []
    added = []
    for x in sorted(targets, key=lambda l: l.birth):
        u = targets[x]
        if u in targets:
            raise ExtractionError(
                f"oldest subsumer {u} of {x} is itself rebuilt: engine bug"
            )
        for tf in g2.formulas:
            if isinstance(tf, Pref) and tf.idx == x:
                removed.append(tf)
            elif isinstance(tf, BoxAt) and tf.idx == x:
                removed.append(tf)
        for z in labels:
            if z != x:
                added.append(Pref(x, x, z))
        for tf in g2.formulas:
            if isinstance(tf, Pref) and tf.idx == u and tf.z != x:
                added.append(Pref(tf.y, x, tf.z))
            elif isinstance(tf, BoxAt) and tf.idx == u:
                if tf.sign:
                    if _copy_positive_box(g2, x, tf.f):
                        added.append(BoxAt(tf.x, x, True, tf.f))
                elif tf.x != x:
                    added.append(BoxAt(tf.x, x, False, tf.f))
        for f in g2.pi(x):
            # the printed construction adds x:[x]C for every C carried by
            # x; only negations fit the calculus' box shape, and they are
            # exactly what the propagation clause at the new center needs
            if isinstance(f, Not):
                added.append(BoxAt(x, x, True, f.arg))
    return TableauSet(
        (g2.formulas - frozenset(removed)) | frozenset(added), g2.root
    )


def _copy_positive_box(g2: TableauSet, x: Label, a: Formula) -> bool:
    if BOX_COPY_MODE == "always":
        return True
    if BOX_COPY_MODE == "literal":
        return a in g2.pi(x)
    return Not(a) in g2.pi(x)


def _peel_ranks(labels, below):
    """Layer the strict order into ranks; None on a cycle."""
    remaining = set(labels)
    rank = {}
    level = 0
    while remaining:
        minimal = [
            z
            for z in remaining
            if not any(y in remaining for y in below.get(z, ()))
        ]
        if not minimal:
            return None
        for z in minimal:
            rank[z] = level
            remaining.discard(z)
        level += 1
    return rank


def extract(g: TableauSet, root: Label, input_formula: Formula) -> ExtractionReport:
    """Canonical model of an open set saturated under blocking.

    Runs the three completion steps, reads worlds, orders and valuation off
    the completed set, and verifies the input formula at the root world
    with the evaluator.
    """
    steps = []
    g1 = complete_step1(g)
    if g1 is not g:
        steps.append("step1")
    g2 = complete_step2(g1)
    if g2 is not g1:
        steps.append("step2")
    g3 = complete_step3(g2)
    if g3 is not g2:
        steps.append("step3")

    labels = g3.labels
    if root not in labels:
        raise ExtractionError(f"root label {root} does not occur in the set")
    name = {l: str(l) for l in labels}
    worlds = tuple(name[l] for l in labels)

    rank = {}
    for x in labels:
        below = {}
        for tf in g3.formulas:
            if isinstance(tf, Pref) and tf.idx == x:
                below.setdefault(tf.z, set()).add(tf.y)
        ranks = _peel_ranks(labels, below)
        if ranks is None:
            raise ExtractionError(
                f"cycle in the order indexed by {x}: closure condition (ii) "
                "was missed"
            )
        rank[name[x]] = {name[z]: r for z, r in ranks.items()}

    val = {}
    for tf in g3.formulas:
        if isinstance(tf, Labelled) and isinstance(tf.f, Atom):
            val.setdefault(tf.f.name, set()).add(name[tf.x])

    try:
        model = PreferentialModel(worlds, rank, val)
    except ModelError as e:
        raise ExtractionError(f"extracted structure is not a model: {e}") from e
    root_world = name[root]
    verified = eval_pref(model, root_world, input_formula)
    return ExtractionReport(model, root_world, tuple(steps), verified)
