"""Tableau engine kernel.

Everything here works on an interned integer representation so the module
compiles cleanly with Cython (the build produces a twin ``csl._engine_cy``
from this very file; ``csl.tableau`` picks whichever is importable).

Formula table: each formula node is an int id with kind/arg tables.
Tableau formulas are plain tuples:

    (0, x, f)        x : f                  plain labelled formula
    (1, x, s, f)     x : (not)[] not f      universal box, s=1 positive
    (2, x, w, s, f)  x : (not)[w] not f     box indexed by label w
    (3, y, w, z)     y <_w z                preference statement

Labels are ints.  Births live in a per-set dict because a centering merge
keeps the surviving label but inherits the smaller birth value.
"""

# formula kinds
ATOM, BOT, NOT, AND, SIM = 0, 1, 2, 3, 4

# rule codes (order gives the deterministic priority inside a tier)
NEG, TAND, TBOXX, TBOX = 0, 1, 2, 3
FAND, F1SIM, F1BOXX = 4, 5, 6
TSIM = 7
CENT = 8
MOD = 9
F2SIM, F2BOXX, FBOX = 10, 11, 12

RULE_NAMES = {
    NEG: "(NEG)",
    TAND: "(T&)",
    TBOXX: "(T[]x)",
    TBOX: "(T[])",
    FAND: "(F&)",
    F1SIM: "(F1<<)",
    F1BOXX: "(F1[]x)",
    TSIM: "(T<<)",
    CENT: "(Cent)",
    MOD: "(Mod)",
    F2SIM: "(F2<<)",
    F2BOXX: "(F2[]x)",
    FBOX: "(F[])",
}

STATIC_RULES = (TAND, FAND, NEG, F1SIM, TSIM, F1BOXX, TBOXX, TBOX, MOD, CENT)
DYNAMIC_RULES = (F2SIM, F2BOXX, FBOX)

# decide statuses
CLOSED, OPEN, CAP = 0, 1, 2


class Tab:
    """Hash-consed formula store."""

    def __init__(self):
        self.kind = []
        self.a1 = []
        self.a2 = []
        self.memo = {}
        self.atom_names = []
        self.atom_ids = {}
        self.bot = self._mk(BOT, -1, -1)

    def _mk(self, kind, a1, a2):
        key = (kind, a1, a2)
        fid = self.memo.get(key)
        if fid is None:
            fid = len(self.kind)
            self.memo[key] = fid
            self.kind.append(kind)
            self.a1.append(a1)
            self.a2.append(a2)
        return fid

    def atom(self, name):
        idx = self.atom_ids.get(name)
        if idx is None:
            idx = len(self.atom_names)
            self.atom_ids[name] = idx
            self.atom_names.append(name)
        return self._mk(ATOM, idx, -1)

    def neg(self, f):
        return self._mk(NOT, f, -1)

    def conj(self, a, b):
        return self._mk(AND, a, b)

    def sim(self, a, b):
        return self._mk(SIM, a, b)

    def neg_present(self, f):
        """Id of the Not node over f if it has been interned, else -1."""
        return self.memo.get((NOT, f, -1), -1)


class TS:
    """One tableau set: formulas, label births, bookkeeping.

    ``agenda`` holds the formulas added on top of an already-saturated
    parent and not yet propagated; None means everything needs a pass."""

    __slots__ = ("fs", "births", "nxt", "root", "closed", "sid", "agenda")

    def __init__(self, fs, births, nxt, root, sid):
        self.fs = fs
        self.births = births
        self.nxt = nxt
        self.root = root
        self.closed = None  # closure reason tuple, or None while open
        self.sid = sid
        self.agenda = None

    def copy(self, sid):
        t = TS(set(self.fs), dict(self.births), self.nxt, self.root, sid)
        t.closed = self.closed
        return t

    def labels_by_birth(self):
        return sorted(self.births, key=lambda x: (self.births[x], x))


def initial_set(tab, root_fid):
    ts = TS(set(), {0: 0}, 1, 0, 0)
    add_formula(ts, (0, 0, root_fid), tab)
    return ts


# ---------------------------------------------------------------------------
# closure


def closure_reason(ts, tf, tab):
    """Would adding tf to ts close it?  Returns a reason or None."""
    fs = ts.fs
    k = tf[0]
    if k == 0:
        x, f = tf[1], tf[2]
        if f == tab.bot:
            return ("i", x, f)
        if tab.kind[f] == NOT and (0, x, tab.a1[f]) in fs:
            return ("i", x, tab.a1[f])
        nf = tab.neg_present(f)
        if nf >= 0 and (0, x, nf) in fs:
            return ("i", x, f)
        return None
    if k == 1:
        x, s, f = tf[1], tf[2], tf[3]
        if (1, x, 1 - s, f) in fs:
            return ("i", x, f)
        return None
    if k == 2:
        x, w, s, f = tf[1], tf[2], tf[3], tf[4]
        if s == 0 and x == w:
            return ("iii", x, f)
        if (2, x, w, 1 - s, f) in fs:
            return ("i", x, f)
        return None
    y, w, z = tf[1], tf[2], tf[3]
    if y == z or (3, z, w, y) in fs:
        return ("ii", y, w, z)
    return None


def add_formula(ts, tf, tab):
    """Insert tf; marks the set closed when a closure condition fires.
    Returns True when the formula was new."""
    if tf in ts.fs:
        return False
    if ts.closed is None:
        reason = closure_reason(ts, tf, tab)
        if reason is not None:
            ts.closed = reason
    ts.fs.add(tf)
    return True


def scan_closure(ts, tab):
    """Full closure check (used after a centering merge rewrites labels)."""
    fs = ts.fs
    for tf in fs:
        k = tf[0]
        if k == 0:
            if tf[2] == tab.bot:
                return ("i", tf[1], tf[2])
            if tab.kind[tf[2]] == NOT and (0, tf[1], tab.a1[tf[2]]) in fs:
                return ("i", tf[1], tab.a1[tf[2]])
        elif k == 1:
            if (1, tf[1], 1 - tf[2], tf[3]) in fs:
                return ("i", tf[1], tf[3])
        elif k == 2:
            if tf[3] == 0 and tf[1] == tf[2]:
                return ("iii", tf[1], tf[4])
            if (2, tf[1], tf[2], 1 - tf[3], tf[4]) in fs:
                return ("i", tf[1], tf[4])
        else:
            if tf[1] == tf[3] or (3, tf[3], tf[2], tf[1]) in fs:
                return ("ii", tf[1], tf[2], tf[3])
    return None


# ---------------------------------------------------------------------------
# static rule instances
#
# An instance is (rule, premises, param, branches) where premises is a tuple
# of the tableau formulas that triggered it, param the chosen existing label
# (or the (x, y) pair for centering), and branches a tuple of tuples of
# formulas to add.  Centering's merge branch is the special marker None.


def _nonbranching_additions(ts, tab):
    """All additions from the non-branching static rules, one pass."""
    fs = ts.fs
    out = []
    labels = ts.labels_by_birth()
    prefs_by_iz = {}
    for tf in fs:
        if tf[0] == 3:
            prefs_by_iz.setdefault((tf[2], tf[3]), []).append(tf)
    for tf in sorted(fs):
        k = tf[0]
        if k == 0:
            x, f = tf[1], tf[2]
            fk = tab.kind[f]
            if fk == AND:
                a, b = tab.a1[f], tab.a2[f]
                if (0, x, a) not in fs or (0, x, b) not in fs:
                    out.append((TAND, (tf,), -1, (((0, x, a), (0, x, b)),)))
            elif fk == NOT and tab.kind[tab.a1[f]] == NOT:
                a = tab.a1[tab.a1[f]]
                if (0, x, a) not in fs:
                    out.append((NEG, (tf,), -1, (((0, x, a),),)))
        elif k == 1 and tf[2] == 1:
            x, f = tf[1], tf[3]
            nf = tab.neg(f)
            for y in labels:
                c1, c2 = (0, y, nf), (1, y, 1, f)
                if c1 not in fs or c2 not in fs:
                    out.append((TBOX, (tf,), y, ((c1, c2),)))
        elif k == 2 and tf[3] == 1:
            z, w, f = tf[1], tf[2], tf[4]
            nf = tab.neg(f)
            for ptf in prefs_by_iz.get((w, z), ()):
                y = ptf[1]
                c1, c2 = (0, y, nf), (2, y, w, 1, f)
                if c1 not in fs or c2 not in fs:
                    out.append((TBOXX, (tf, ptf), -1, ((c1, c2),)))
    return out


def _buckets(ts, tab):
    """One pass over the set: the premise lists the branching rules need,
    sorted for deterministic instance order."""
    possims = []
    locals_ = []  # F& / F1<< / F1[]x premise formulas
    prefs = []
    for tf in ts.fs:
        k = tf[0]
        if k == 0:
            f = tf[2]
            fk = tab.kind[f]
            if fk == SIM:
                possims.append(tf)
            elif fk == NOT:
                gk = tab.kind[tab.a1[f]]
                if gk == AND or gk == SIM:
                    locals_.append(tf)
        elif k == 2:
            if tf[3] == 0:
                locals_.append(tf)
        elif k == 3:
            prefs.append(tf)
    possims.sort()
    locals_.sort()
    prefs.sort()
    return possims, locals_, prefs


def _local_branching_instances(ts, tab, bk=None):
    fs = ts.fs
    out = []
    if bk is None:
        bk = _buckets(ts, tab)
    for tf in bk[1]:
        if tf[0] == 0:
            x, f = tf[1], tf[2]
            g = tab.a1[f]
            gk = tab.kind[g]
            if gk == AND:
                na, nb = tab.neg(tab.a1[g]), tab.neg(tab.a2[g])
                if (0, x, na) in fs or (0, x, nb) in fs:
                    continue
                out.append((FAND, (tf,), -1, (((0, x, na),), ((0, x, nb),))))
            else:
                a, b = tab.a1[g], tab.a2[g]
                na, nb = tab.neg(a), tab.neg(b)
                b1 = ((1, x, 1, a),)
                b2 = ((0, x, b),)
                b3 = ((0, x, na), (0, x, nb))
                if (
                    b1[0] in fs
                    or b2[0] in fs
                    or (b3[0] in fs and b3[1] in fs)
                ):
                    continue
                out.append((F1SIM, (tf,), -1, (b1, b2, b3)))
        else:
            w, f = tf[2], tf[4]
            nf = tab.neg(f)
            if (0, w, nf) in fs or (0, w, f) in fs:
                continue
            out.append(
                (F1BOXX, (tf,), -1, (((0, w, nf),), ((0, w, f),)))
            )
    return out


def _tsim_instances(ts, tab, bk=None):
    fs = ts.fs
    out = []
    if bk is None:
        bk = _buckets(ts, tab)
    labels = ts.labels_by_birth()
    for tf in bk[0]:
        x, f = tf[1], tf[2]
        a, b = tab.a1[f], tab.a2[f]
        na, nb = tab.neg(a), tab.neg(b)
        for y in labels:
            b1 = ((1, x, 0, a), (0, y, nb))
            b2 = ((0, y, b), (2, y, x, 0, a))
            if (b1[0] in fs and b1[1] in fs) or (b2[0] in fs and b2[1] in fs):
                continue
            out.append((TSIM, (tf,), y, (b1, b2)))
    return out


def _cent_instances(ts, bk=None):
    fs = ts.fs
    out = []
    labels = ts.labels_by_birth()
    for x in labels:
        for y in labels:
            if x != y and (3, x, x, y) not in fs:
                out.append((CENT, (), (x, y), (((3, x, x, y),), None)))
    return out


def _mod_instances(ts, bk=None, tab=None):
    fs = ts.fs
    out = []
    if bk is None:
        bk = _buckets(ts, tab) if tab is not None else (None, None, sorted(
            tf for tf in fs if tf[0] == 3
        ))
    labels = ts.labels_by_birth()
    for tf in bk[2]:
        z, w, u = tf[1], tf[2], tf[3]
        for y in labels:
            c1, c2 = (3, z, w, y), (3, y, w, u)
            if c1 in fs or c2 in fs:
                continue
            out.append((MOD, (tf,), y, ((c1,), (c2,))))
    return out


def static_instances(ts, tab):
    """Every applicable static instance under restriction 1, all rules."""
    bk = _buckets(ts, tab)
    out = []
    out.extend(_nonbranching_additions(ts, tab))
    out.extend(_local_branching_instances(ts, tab, bk))
    out.extend(_tsim_instances(ts, tab, bk))
    out.extend(_cent_instances(ts, bk))
    out.extend(_mod_instances(ts, bk))
    return out


# ---------------------------------------------------------------------------
# dynamic rules and blocking


def _pi_map(ts):
    pi = {}
    for x in ts.births:
        pi[x] = set()
    for tf in ts.fs:
        if tf[0] == 0:
            pi[tf[1]].add(tf[2])
    return pi


def _boxplus_map(ts):
    bp = {}
    for tf in ts.fs:
        if tf[0] == 2 and tf[3] == 1:
            bp.setdefault((tf[2], tf[1]), set()).add(tf[4])
    return bp


def _pi_blocked(ts, pi, x):
    """Blocking 2b/3b: an older label whose plain formulas subsume x's."""
    bx = ts.births[x]
    px = pi[x]
    for u in ts.births:
        if ts.births[u] < bx and px <= pi[u]:
            return u
    return None


def dynamic_instances(ts, tab):
    """Unblocked dynamic instances, sorted by the premise label's age.

    Instance shape: (rule, premises, sort_key); the fresh label is chosen
    at application time.
    """
    fs = ts.fs
    births = ts.births
    pi = _pi_map(ts)
    bp = _boxplus_map(ts)
    out = []
    for tf in sorted(fs):
        k = tf[0]
        if k == 0:
            x, f = tf[1], tf[2]
            if tab.kind[f] != NOT or tab.kind[tab.a1[f]] != SIM:
                continue
            g = tab.a1[f]
            a, b = tab.a1[g], tab.a2[g]
            na, nb = tab.neg_present(a), tab.neg_present(b)
            if na < 0 or nb < 0:
                continue
            pna, pnb = (0, x, na), (0, x, nb)
            if pna not in fs or pnb not in fs:
                continue
            # 2a: a witness already exists
            if any(
                (0, y, b) in fs and (2, y, x, 1, a) in fs for y in births
            ):
                continue
            # 2b: an older subsuming label
            if _pi_blocked(ts, pi, x) is not None:
                continue
            out.append((F2SIM, (tf, pna, pnb), (births[x], 0, tf)))
        elif k == 1 and tf[2] == 0:
            x, f = tf[1], tf[3]
            # restriction 4: some label already carries f
            if any((0, y, f) in fs for y in births):
                continue
            out.append((FBOX, (tf,), (births[x], 2, tf)))
        elif k == 2 and tf[3] == 0:
            z, w, f = tf[1], tf[2], tf[4]
            nf = tab.neg_present(f)
            if nf < 0:
                continue
            pnf = (0, w, nf)
            if pnf not in fs:
                continue
            # 3a: a minimal witness already exists
            if any(
                (3, y, w, z) in fs
                and (0, y, f) in fs
                and (2, y, w, 1, f) in fs
                for y in births
            ):
                continue
            # 3b: the index label is subsumed by an older one
            if _pi_blocked(ts, pi, w) is not None:
                continue
            # 3c: an older label below the same index subsumes z's boxes
            bz = bp.get((w, z), set())
            blocked = False
            for v in births:
                if (
                    births[v] < births[z]
                    and (2, v, w, 0, f) in fs
                    and bz <= bp.get((w, v), set())
                ):
                    blocked = True
                    break
            if blocked:
                continue
            out.append((F2BOXX, (tf, pnf), (births[z], 1, tf)))
    out.sort(key=lambda inst: inst[2])
    return out


def apply_dynamic(ts, inst, tab):
    """Apply in place; creates the fresh label.  Returns the new label."""
    rule = inst[0]
    y = ts.nxt
    ts.nxt = y + 1
    ts.births[y] = y
    tf = inst[1][0]
    if rule == F2SIM:
        g = tab.a1[tf[2]]
        a, b = tab.a1[g], tab.a2[g]
        added = ((0, y, b), (2, y, tf[1], 1, a))
    elif rule == F2BOXX:
        z, w, f = tf[1], tf[2], tf[4]
        added = ((3, y, w, z), (0, y, f), (2, y, w, 1, f))
    else:  # FBOX
        added = ((0, y, tf[3]),)
    for a in added:
        add_formula(ts, a, tab)
    return y, added


# ---------------------------------------------------------------------------
# applying static instances


def substitute_label(ts, x, y, tab, sid):
    """The centering merge branch: replace label x by y everywhere."""
    out = set()
    for tf in ts.fs:
        k = tf[0]
        if k == 0:
            out.add((0, y if tf[1] == x else tf[1], tf[2]))
        elif k == 1:
            out.add((1, y if tf[1] == x else tf[1], tf[2], tf[3]))
        elif k == 2:
            out.add(
                (
                    2,
                    y if tf[1] == x else tf[1],
                    y if tf[2] == x else tf[2],
                    tf[3],
                    tf[4],
                )
            )
        else:
            out.add(
                (
                    3,
                    y if tf[1] == x else tf[1],
                    y if tf[2] == x else tf[2],
                    y if tf[3] == x else tf[3],
                )
            )
    births = dict(ts.births)
    births[y] = min(births[x], births[y])
    del births[x]
    t = TS(out, births, ts.nxt, y if ts.root == x else ts.root, sid)
    t.closed = scan_closure(t, tab)
    return t


def apply_static(ts, inst, tab, next_sid):
    """Children of ts under inst, in rule order.  Fresh set ids are taken
    from next_sid onward.  Each child's agenda is what it actually added
    (None after a merge, which rewrites labels wholesale)."""
    rule, premises, param, branches = inst
    children = []
    sid = next_sid
    for br in branches:
        if br is None:  # centering merge
            child = substitute_label(ts, param[0], param[1], tab, sid)
            child.agenda = None
        else:
            child = ts.copy(sid)
            new = []
            for tf in br:
                if add_formula(child, tf, tab):
                    new.append(tf)
            child.agenda = tuple(new)
        children.append(child)
        sid += 1
    return children


# ---------------------------------------------------------------------------
# the decision procedure


def _would_close(ts, br, tab):
    if br is None:
        return False
    for tf in br:
        if tf not in ts.fs and closure_reason(ts, tf, tab) is not None:
            return True
    return False


def _saturate(ts, tab, agenda, trace, stats):
    """Propagate the non-branching static rules from the agenda to a
    fixpoint.

    The agenda holds formulas not yet processed (for a fresh branch: the
    formulas the branch added; after a merge: everything).  The parent set
    is assumed saturated for everything else, so one worklist pass is
    complete.  A ('label', y) entry announces a fresh label, which the
    universal-box propagation must catch up on.
    """
    fs = ts.fs
    # per-set propagation indices, rebuilt on entry
    labels = list(ts.births)
    ubox_all = {}  # f -> carrier tuple, for catching up fresh labels
    ubox_done = set()  # f already propagated to every label in this round
    pidx = {}  # (w, z) -> set of f with z:[w]~f
    prefin = {}  # (w, z) -> set of y with y <_w z
    for tf in fs:
        k = tf[0]
        if k == 1 and tf[2] == 1:
            ubox_all.setdefault(tf[3], tf)
        elif k == 2 and tf[3] == 1:
            pidx.setdefault((tf[2], tf[1]), set()).add(tf[4])
        elif k == 3:
            prefin.setdefault((tf[2], tf[3]), set()).add(tf[1])

    queue = list(agenda)

    def push(new_tf, rule, premises):
        if add_formula(ts, new_tf, tab):
            stats[1] += 1
            if trace is not None:
                trace.append(
                    ("rule", ts.sid, rule, premises, -1, ((ts.sid, (new_tf,)),))
                )
            queue.append(new_tf)

    while queue:
        if ts.closed is not None:
            return
        ev = queue.pop()
        if ev[0] == "label":
            y = ev[1]
            labels.append(y)
            for f in sorted(ubox_all):
                carrier = ubox_all[f]
                nf = tab.neg(f)
                push((0, y, nf), TBOX, (carrier,))
                push((1, y, 1, f), TBOX, (carrier,))
            continue
        k = ev[0]
        if k == 0:
            x, f = ev[1], ev[2]
            fk = tab.kind[f]
            if fk == AND:
                push((0, x, tab.a1[f]), TAND, (ev,))
                push((0, x, tab.a2[f]), TAND, (ev,))
            elif fk == NOT and tab.kind[tab.a1[f]] == NOT:
                push((0, x, tab.a1[tab.a1[f]]), NEG, (ev,))
        elif k == 1:
            if ev[2] == 1:
                f = ev[3]
                ubox_all.setdefault(f, ev)
                if f not in ubox_done:
                    ubox_done.add(f)
                    nf = tab.neg(f)
                    for y in labels:
                        push((0, y, nf), TBOX, (ev,))
                        push((1, y, 1, f), TBOX, (ev,))
        elif k == 2:
            if ev[3] == 1:
                z, w, f = ev[1], ev[2], ev[4]
                pidx.setdefault((w, z), set()).add(f)
                nf = tab.neg(f)
                for y in prefin.get((w, z), ()):
                    push((0, y, nf), TBOXX, (ev,))
                    push((2, y, w, 1, f), TBOXX, (ev,))
        else:
            y, w, z = ev[1], ev[2], ev[3]
            prefin.setdefault((w, z), set()).add(y)
            for f in sorted(pidx.get((w, z), ())):
                carrier = (2, z, w, 1, f)
                nf = tab.neg(f)
                push((0, y, nf), TBOXX, (carrier, ev))
                push((2, y, w, 1, f), TBOXX, (carrier, ev))


def _pick_branching(ts, tab, first_tier, last_tier):
    """Deterministic move ordering over the branching static tiers.

    Tiers: 0 = local one-label rules, 1 = the positive-similarity rule,
    2 = centering, 3 = modularity.  Earlier tiers win; within a tier fewer
    live branches win, with the canonical premise tuple as the final
    tie-break.  An instance with at most one branch that would stay open
    is taken immediately from any scanned tier, since applying it cannot
    grow the search tree.
    """
    bk = _buckets(ts, tab)
    best = None
    best_key = None
    for tier in range(first_tier, last_tier + 1):
        if best is not None:
            break
        if tier == 0:
            gen = _local_branching_instances(ts, tab, bk)
        elif tier == 1:
            gen = _tsim_instances(ts, tab, bk)
        elif tier == 2:
            gen = _cent_instances(ts, bk)
        else:
            gen = _mod_instances(ts, bk)
        for inst in gen:
            live = sum(
                0 if _would_close(ts, br, tab) else 1 for br in inst[3]
            )
            if live <= 1:
                return inst
            param = inst[2] if isinstance(inst[2], tuple) else (inst[2],)
            key = (live, len(inst[3]), tier, inst[0], inst[1], param)
            if best_key is None or key < best_key:
                best, best_key = inst, key
    return best


# When set, the preference rules (Cent)/(Mod) saturate before any dynamic
# step, as the source procedure prescribes.  The default defers them until
# no dynamic rule applies: the final sets satisfy exactly the same
# saturation-under-blocking conditions, but closed subtrees stop paying an
# exponential preference-linearization toll before every witness step.
STRICT_STATIC_FIRST = False


def decide_encoded(tab, root_fid, label_cap, want_trace=False):
    """Run the systematic procedure from {x0: root_fid}.

    Returns (status, open_ts_or_None, stats, trace) with status CLOSED,
    OPEN or CAP.  stats = [sets_created, rule_applications, max_labels].
    """
    trace = [] if want_trace else None
    ts0 = initial_set(tab, root_fid)
    ts0.agenda = tuple(ts0.fs)
    stats = [1, 0, 1]
    sid_counter = [1]
    stack = [ts0]
    while stack:
        ts = stack.pop()
        while True:
            if ts.closed is None and ts.agenda != ():
                _saturate(
                    ts,
                    tab,
                    ts.fs if ts.agenda is None else ts.agenda,
                    trace,
                    stats,
                )
                ts.agenda = ()
            if ts.closed is not None:
                if want_trace:
                    trace.append(("closed", ts.sid, ts.closed))
                break
            pre_last = 3 if STRICT_STATIC_FIRST else 1
            inst = _pick_branching(ts, tab, 0, pre_last)
            if inst is None:
                dyn = dynamic_instances(ts, tab)
                if dyn:
                    if len(ts.births) + 1 > label_cap:
                        return (CAP, None, stats, trace)
                    chosen = dyn[0]
                    y, added = apply_dynamic(ts, chosen, tab)
                    stats[1] += 1
                    if len(ts.births) > stats[2]:
                        stats[2] = len(ts.births)
                    if want_trace:
                        trace.append(
                            ("rule", ts.sid, chosen[0], chosen[1], y,
                             ((ts.sid, added),))
                        )
                    ts.agenda = (("label", y),) + added
                    continue
                if not STRICT_STATIC_FIRST:
                    inst = _pick_branching(ts, tab, 2, 3)
            if inst is not None:
                children = apply_static(ts, inst, tab, sid_counter[0])
                sid_counter[0] += len(children)
                stats[0] += len(children)
                stats[1] += 1
                if want_trace:
                    trace.append(
                        ("rule", ts.sid, inst[0], inst[1], inst[2],
                         tuple(
                             (c.sid, None if br is None else br)
                             for c, br in zip(children, inst[3])
                         ))
                    )
                for c in reversed(children):
                    stack.append(c)
                break
            # saturated under blocking and open
            if want_trace:
                trace.append(("open", ts.sid))
            return (OPEN, ts, stats, trace)
    return (CLOSED, None, stats, trace)


# ---------------------------------------------------------------------------
# saturation checking (the completeness-side test oracle)


def saturation_violations(ts, tab):
    """Violated saturation clauses, literally per the saturated-set
    definition.  Returns a list of (clause, witness) pairs."""
    fs = ts.fs
    labels = ts.labels_by_birth()
    out = []
    some_negbox = {}  # f -> bool: a label carries not [] not f
    for tf in fs:
        if tf[0] == 1 and tf[2] == 0:
            some_negbox[tf[3]] = True
    for tf in sorted(fs):
        k = tf[0]
        if k == 0:
            x, f = tf[1], tf[2]
            fk = tab.kind[f]
            if fk == AND:
                if (0, x, tab.a1[f]) not in fs or (0, x, tab.a2[f]) not in fs:
                    out.append(("T&", tf))
            elif fk == SIM:
                a, b = tab.a1[f], tab.a2[f]
                nb = tab.neg_present(b)
                for y in labels:
                    # the universal-box disjunct is label-free in the
                    # saturation definition, so any carrier will do
                    first = (
                        nb >= 0
                        and (0, y, nb) in fs
                        and some_negbox.get(a, False)
                    )
                    second = (0, y, b) in fs and (2, y, x, 0, a) in fs
                    if not (first or second):
                        out.append(("T<<", (tf, y)))
            elif fk == NOT:
                g = tab.a1[f]
                gk = tab.kind[g]
                if gk == NOT:
                    if (0, x, tab.a1[g]) not in fs:
                        out.append(("NEG", tf))
                elif gk == AND:
                    na, nb = tab.neg_present(tab.a1[g]), tab.neg_present(tab.a2[g])
                    ok = (na >= 0 and (0, x, na) in fs) or (
                        nb >= 0 and (0, x, nb) in fs
                    )
                    if not ok:
                        out.append(("F&", tf))
                elif gk == SIM:
                    a, b = tab.a1[g], tab.a2[g]
                    na, nb = tab.neg_present(a), tab.neg_present(b)
                    c1 = (1, x, 1, a) in fs
                    c2 = (0, x, b) in fs
                    c3 = (
                        na >= 0
                        and nb >= 0
                        and (0, x, na) in fs
                        and (0, x, nb) in fs
                        and any(
                            (0, y, b) in fs and (2, y, x, 1, a) in fs
                            for y in labels
                        )
                    )
                    if not (c1 or c2 or c3):
                        out.append(("F<<", tf))
        elif k == 1:
            x, s, f = tf[1], tf[2], tf[3]
            nf = tab.neg_present(f)
            if s == 1:
                for y in labels:
                    if (
                        nf < 0
                        or (0, y, nf) not in fs
                        or (1, y, 1, f) not in fs
                    ):
                        out.append(("T[]", (tf, y)))
            else:
                if not any((0, y, f) in fs for y in labels):
                    out.append(("F[]", tf))
        elif k == 2:
            z, w, s, f = tf[1], tf[2], tf[3], tf[4]
            nf = tab.neg_present(f)
            if s == 1:
                for y in labels:
                    if (3, y, w, z) in fs:
                        if (
                            nf < 0
                            or (0, y, nf) not in fs
                            or (2, y, w, 1, f) not in fs
                        ):
                            out.append(("T[]x", (tf, y)))
            else:
                c1 = (0, w, f) in fs
                c2 = (
                    nf >= 0
                    and (0, w, nf) in fs
                    and any(
                        (3, y, w, z) in fs
                        and (0, y, f) in fs
                        and (2, y, w, 1, f) in fs
                        for y in labels
                    )
                )
                if not (c1 or c2):
                    out.append(("F[]x", tf))
        else:
            y, w, z = tf[1], tf[2], tf[3]
            for u in labels:
                if (3, u, w, z) not in fs and (3, y, w, u) not in fs:
                    out.append(("Mod", (tf, u)))
    for x in labels:
        for y in labels:
            if x != y and (3, x, x, y) not in fs:
                out.append(("Cent", (x, y)))
    return out
