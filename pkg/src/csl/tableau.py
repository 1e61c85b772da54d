"""Labelled tableau engine: public types and the decision procedure.

The heavy lifting lives in the kernel module, which works on an interned
integer encoding and is also built as a compiled extension.  The compiled
twin ``csl._engine_cy`` is preferred when importable; set ``CSL_PURE_ENGINE``
in the environment to force the pure-Python kernel.  This module owns the
friendly value types and converts between the two representations.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

from .formula import (
    And,
    Atom,
    Bottom,
    Formula,
    Not,
    Sim,
    has_cond,
    print_formula,
    size,
)

if os.environ.get("CSL_PURE_ENGINE"):
    from . import _engine as _eng
else:
    try:
        from . import _engine_cy as _eng  # type: ignore[attr-defined]
    except ImportError:
        from . import _engine as _eng

ENGINE_BACKEND = _eng.__name__


class ResourceLimitExceeded(RuntimeError):
    """The configurable label cap was hit before the tableau finished."""


# ---------------------------------------------------------------------------
# decoded value types


@dataclass(frozen=True, order=True)
class Label:
    """Tableau label; birth values order labels by age within one run."""

    id: int
    birth: int

    def __str__(self):
        return f"x{self.id}"


class TableauFormula:
    __slots__ = ()


@dataclass(frozen=True)
class Labelled(TableauFormula):
    x: Label
    f: Formula

    def __str__(self):
        return f"{self.x}:{_wrap(self.f)}"


@dataclass(frozen=True)
class BoxU(TableauFormula):
    """x : (not) [] not f — the universal modality, guard-negation shape."""

    x: Label
    sign: bool
    f: Formula

    def __str__(self):
        n = "" if self.sign else "~"
        return f"{self.x}:{n}[]~{_wrap(self.f)}"


@dataclass(frozen=True)
class BoxAt(TableauFormula):
    """x : (not) [idx] not f — the pseudo-modality indexed by a label."""

    x: Label
    idx: Label
    sign: bool
    f: Formula

    def __str__(self):
        n = "" if self.sign else "~"
        return f"{self.x}:{n}[{self.idx}]~{_wrap(self.f)}"


@dataclass(frozen=True)
class Pref(TableauFormula):
    """y <_idx z: y is strictly preferred to z as seen from idx."""

    y: Label
    idx: Label
    z: Label

    def __str__(self):
        return f"{self.y} <[{self.idx}] {self.z}"


def _wrap(f: Formula) -> str:
    s = print_formula(f)
    if isinstance(f, (Atom, Bottom)) or s in ("true",):
        return s
    if isinstance(f, Not):
        return s
    return f"({s})"


@dataclass(frozen=True)
class TableauSet:
    """One branch of the search: a set of tableau formulas plus the root
    label alias (the initial label, possibly renamed by merges)."""

    formulas: frozenset
    root: Optional[Label] = None

    @property
    def labels(self) -> tuple:
        seen = {}
        for tf in self.formulas:
            for l in _labels_of(tf):
                seen[l.id] = l
        return tuple(sorted(seen.values(), key=lambda l: (l.birth, l.id)))

    def pi(self, x: Label) -> frozenset:
        """Plain (non-boxed) formulas carried by x."""
        return frozenset(
            tf.f for tf in self.formulas if isinstance(tf, Labelled) and tf.x == x
        )

    def box_plus(self, idx: Label, y: Label) -> frozenset:
        """Arguments of the positive idx-indexed boxes carried by y."""
        return frozenset(
            tf.f
            for tf in self.formulas
            if isinstance(tf, BoxAt) and tf.sign and tf.x == y and tf.idx == idx
        )

    def with_formulas(self, extra=(), removed=()) -> "TableauSet":
        fs = (self.formulas - frozenset(removed)) | frozenset(extra)
        return TableauSet(fs, self.root)

    def __str__(self):
        return "{" + ", ".join(sorted(str(tf) for tf in self.formulas)) + "}"


def _labels_of(tf):
    if isinstance(tf, Labelled):
        return (tf.x,)
    if isinstance(tf, BoxU):
        return (tf.x,)
    if isinstance(tf, BoxAt):
        return (tf.x, tf.idx)
    return (tf.y, tf.idx, tf.z)


@dataclass(frozen=True)
class RuleInstance:
    """One applicable rule application: premises from the set, the chosen
    label parameter (or label pair for centering), and the formulas each
    branch adds.  A ``None`` branch is centering's merge branch."""

    rule: str
    premises: tuple
    param: object
    branches: tuple

    def __str__(self):
        parts = []
        for br in self.branches:
            parts.append(
                "[x/y]" if br is None else ", ".join(str(tf) for tf in br)
            )
        prem = ", ".join(str(tf) for tf in self.premises)
        return f"{self.rule} {prem} => {' / '.join(parts)}"


@dataclass(frozen=True)
class DecideStats:
    sets_created: int
    rule_applications: int
    max_labels: int


@dataclass(frozen=True)
class Verdict:
    status: str  # "CLOSED" | "OPEN_SATURATED"
    open_set: Optional[TableauSet]
    stats: DecideStats
    trace: Optional[tuple] = None

    def __post_init__(self):
        assert (self.status == "OPEN_SATURATED") == (self.open_set is not None)


# ---------------------------------------------------------------------------
# codec between decoded values and the kernel encoding


def _encode_formula(tab, f: Formula) -> int:
    if isinstance(f, Atom):
        return tab.atom(f.name)
    if isinstance(f, Bottom):
        return tab.bot
    if isinstance(f, Not):
        return tab.neg(_encode_formula(tab, f.arg))
    if isinstance(f, And):
        return tab.conj(_encode_formula(tab, f.left), _encode_formula(tab, f.right))
    if isinstance(f, Sim):
        return tab.sim(_encode_formula(tab, f.left), _encode_formula(tab, f.right))
    raise ValueError(f"the tableau language has no ~>: {f}")


def _decode_formula(tab, fid: int, memo: dict) -> Formula:
    f = memo.get(fid)
    if f is not None:
        return f
    k = tab.kind[fid]
    if k == _eng.ATOM:
        f = Atom(tab.atom_names[tab.a1[fid]])
    elif k == _eng.BOT:
        f = Bottom()
    elif k == _eng.NOT:
        f = Not(_decode_formula(tab, tab.a1[fid], memo))
    elif k == _eng.AND:
        f = And(
            _decode_formula(tab, tab.a1[fid], memo),
            _decode_formula(tab, tab.a2[fid], memo),
        )
    else:
        f = Sim(
            _decode_formula(tab, tab.a1[fid], memo),
            _decode_formula(tab, tab.a2[fid], memo),
        )
    memo[fid] = f
    return f


def _encode_set(g: TableauSet):
    tab = _eng.Tab()
    births = {}
    for l in g.labels:
        births[l.id] = l.birth
    fs = set()
    for tf in g.formulas:
        fs.add(_encode_tf(tab, tf))
    nxt = max(births, default=-1) + 1
    root = g.root.id if g.root is not None else min(births, default=0)
    ts = _eng.TS(fs, births, nxt, root, 0)
    ts.closed = _eng.scan_closure(ts, tab)
    return tab, ts


def _encode_tf(tab, tf):
    if isinstance(tf, Labelled):
        return (0, tf.x.id, _encode_formula(tab, tf.f))
    if isinstance(tf, BoxU):
        return (1, tf.x.id, 1 if tf.sign else 0, _encode_formula(tab, tf.f))
    if isinstance(tf, BoxAt):
        return (
            2,
            tf.x.id,
            tf.idx.id,
            1 if tf.sign else 0,
            _encode_formula(tab, tf.f),
        )
    if isinstance(tf, Pref):
        return (3, tf.y.id, tf.idx.id, tf.z.id)
    raise TypeError(f"not a tableau formula: {tf!r}")


def _decode_tf(tab, tf, births, memo):
    k = tf[0]
    if k == 0:
        return Labelled(_lbl(tf[1], births), _decode_formula(tab, tf[2], memo))
    if k == 1:
        return BoxU(
            _lbl(tf[1], births), tf[2] == 1, _decode_formula(tab, tf[3], memo)
        )
    if k == 2:
        return BoxAt(
            _lbl(tf[1], births),
            _lbl(tf[2], births),
            tf[3] == 1,
            _decode_formula(tab, tf[4], memo),
        )
    return Pref(_lbl(tf[1], births), _lbl(tf[2], births), _lbl(tf[3], births))


def _lbl(i, births):
    return Label(i, births[i])


def _decode_set(tab, ts) -> TableauSet:
    memo = {}
    fs = frozenset(_decode_tf(tab, tf, ts.births, memo) for tf in ts.fs)
    root = Label(ts.root, ts.births[ts.root]) if ts.root in ts.births else None
    return TableauSet(fs, root)


# ---------------------------------------------------------------------------
# public operations


def is_closed(g: TableauSet) -> bool:
    """Closure check: complementary pair or falsity, mutual preference, or
    a label strictly below itself under its own index."""
    tab, ts = _encode_set(g)
    return _eng.scan_closure(ts, tab) is not None


def _decode_instance(tab, ts, inst) -> RuleInstance:
    rule, premises, param, branches = inst
    memo = {}
    prem = tuple(_decode_tf(tab, tf, ts.births, memo) for tf in premises)
    brs = tuple(
        None
        if br is None
        else tuple(_decode_tf(tab, tf, ts.births, memo) for tf in br)
        for br in branches
    )
    if rule == _eng.CENT:
        p = (_lbl(param[0], ts.births), _lbl(param[1], ts.births))
    elif isinstance(param, int) and param >= 0:
        p = _lbl(param, ts.births)
    else:
        p = None
    return RuleInstance(_eng.RULE_NAMES[rule], prem, p, brs)


def applicable_static(g: TableauSet) -> list:
    """All static instances whose premises are present and which
    restriction 1 does not skip."""
    tab, ts = _encode_set(g)
    if ts.closed is not None:
        return []
    return [_decode_instance(tab, ts, i) for i in _eng.static_instances(ts, tab)]


def applicable_dynamic(g: TableauSet) -> Optional[RuleInstance]:
    """The unique dynamic instance chosen by the systematic procedure, or
    None; only meaningful once no static rule applies."""
    tab, ts = _encode_set(g)
    if ts.closed is not None:
        return None
    insts = _eng.dynamic_instances(ts, tab)
    if not insts:
        return None
    rule, premises, _key = insts[0]
    fresh = Label(ts.nxt, ts.nxt)
    memo = {}
    prem = tuple(_decode_tf(tab, tf, ts.births, memo) for tf in premises)
    tf = premises[0]
    if rule == _eng.F2SIM:
        g0 = tab.a1[tf[2]]
        a = _decode_formula(tab, tab.a1[g0], memo)
        b = _decode_formula(tab, tab.a2[g0], memo)
        x = _lbl(tf[1], ts.births)
        branch = (Labelled(fresh, b), BoxAt(fresh, x, True, a))
    elif rule == _eng.F2BOXX:
        z = _lbl(tf[1], ts.births)
        w = _lbl(tf[2], ts.births)
        a = _decode_formula(tab, tf[4], memo)
        branch = (Pref(fresh, w, z), Labelled(fresh, a), BoxAt(fresh, w, True, a))
    else:
        a = _decode_formula(tab, tf[3], memo)
        branch = (Labelled(fresh, a),)
    return RuleInstance(_eng.RULE_NAMES[rule], prem, fresh, (branch,))


def apply(g: TableauSet, inst: RuleInstance) -> list:
    """Resulting branch sets of applying inst to g."""
    tab, ts = _encode_set(g)
    if inst.rule in (RULE_F2SIM, RULE_F2BOXX, RULE_FBOX):
        for cand in _eng.dynamic_instances(ts, tab):
            if _decode_same_dynamic(tab, ts, cand, inst):
                child = ts.copy(1)
                _eng.apply_dynamic(child, cand, tab)
                return [_decode_set(tab, child)]
        raise ValueError(f"instance not applicable: {inst}")
    for cand in _eng.static_instances(ts, tab):
        dec = _decode_instance(tab, ts, cand)
        if dec == inst:
            children = _eng.apply_static(ts, cand, tab, 1)
            return [_decode_set(tab, c) for c in children]
    raise ValueError(f"instance not applicable: {inst}")


RULE_F2SIM = _eng.RULE_NAMES[_eng.F2SIM]
RULE_F2BOXX = _eng.RULE_NAMES[_eng.F2BOXX]
RULE_FBOX = _eng.RULE_NAMES[_eng.FBOX]


def _decode_same_dynamic(tab, ts, cand, inst) -> bool:
    memo = {}
    prem = tuple(_decode_tf(tab, tf, ts.births, memo) for tf in cand[1])
    return _eng.RULE_NAMES[cand[0]] == inst.rule and prem == inst.premises


def is_saturated(g: TableauSet) -> list:
    """Violated saturation clauses as (clause, detail) pairs; empty means
    fully saturated."""
    tab, ts = _encode_set(g)
    out = []
    memo = {}
    for clause, info in _eng.saturation_violations(ts, tab):
        out.append((clause, _describe_violation(tab, ts, info, memo)))
    return out


def _describe_violation(tab, ts, info, memo):
    if isinstance(info, tuple) and info and isinstance(info[0], tuple):
        tf, extra = info
        return f"{_decode_tf(tab, tf, ts.births, memo)} @ x{extra}"
    if isinstance(info, tuple) and len(info) == 2 and isinstance(info[0], int):
        return f"x{info[0]}, x{info[1]}"
    return str(_decode_tf(tab, info, ts.births, memo))


def default_label_cap(f: Formula) -> int:
    """2^n plus slack, n the size of the input formula."""
    return 2 ** size(f) + 16


def decide(
    f: Formula,
    label_cap: Optional[int] = None,
    trace: bool = False,
) -> Verdict:
    """Decide satisfiability of f by the systematic tableau procedure.

    Starts from a single set {x0: f}; static rules run to fixpoint, then one
    dynamic step on the oldest eligible label, depth-first over branches.
    Returns CLOSED when every branch closes, otherwise OPEN_SATURATED with
    the first open branch that is saturated under blocking.
    """
    if has_cond(f):
        raise ValueError("decide expects a ~>-free formula; translate first")
    if label_cap is None:
        label_cap = default_label_cap(f)
    tab = _eng.Tab()
    root_fid = _encode_formula(tab, f)
    status, open_ts, stats, raw_trace = _eng.decide_encoded(
        tab, root_fid, label_cap, want_trace=trace
    )
    if status == _eng.CAP:
        raise ResourceLimitExceeded(
            f"label cap {label_cap} exceeded while deciding {print_formula(f)}"
        )
    lines = tuple(_format_trace(tab, raw_trace)) if trace else None
    dstats = DecideStats(stats[0], stats[1], stats[2])
    if status == _eng.CLOSED:
        return Verdict("CLOSED", None, dstats, lines)
    return Verdict("OPEN_SATURATED", _decode_set(tab, open_ts), dstats, lines)


def _format_trace(tab, raw_trace):
    memo = {}

    def fmt_tf(tf):
        k = tf[0]
        if k == 0:
            return f"x{tf[1]}:{_wrap(_decode_formula(tab, tf[2], memo))}"
        if k == 1:
            n = "" if tf[2] == 1 else "~"
            return f"x{tf[1]}:{n}[]~{_wrap(_decode_formula(tab, tf[3], memo))}"
        if k == 2:
            n = "" if tf[3] == 1 else "~"
            return (
                f"x{tf[1]}:{n}[x{tf[2]}]~"
                f"{_wrap(_decode_formula(tab, tf[4], memo))}"
            )
        return f"x{tf[1]} <[x{tf[2]}] x{tf[3]}"

    for ev in raw_trace:
        if ev[0] == "rule":
            _, sid, rule, premises, param, branches = ev
            prem = ", ".join(fmt_tf(tf) for tf in premises) or "-"
            parts = []
            for child_sid, br in branches:
                body = "[x/y]" if br is None else ", ".join(fmt_tf(tf) for tf in br)
                parts.append(f"set={child_sid}: {body}")
            yield f"{_eng.RULE_NAMES[rule]} {prem} => {' / '.join(parts)} | set={sid}"
        elif ev[0] == "closed":
            yield f"closed set={ev[1]} by ({ev[2][0]})"
        else:
            yield f"open set={ev[1]}"
