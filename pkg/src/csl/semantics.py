"""Finite models for the similarity language and the brute-force oracle.

Two interchangeable model classes: preferential models, whose per-world
strict modular orders are represented by ranking functions (modularity is
then structural), and distance minspace models over exact rationals.
``enumerate_models`` streams every preferential model up to a world bound,
which makes ``oracle_sat`` an exhaustive satisfiability check that is
completely independent of the tableau engine.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .formula import And, Atom, Bottom, Cond, Formula, Not, Sim, atom_names, has_cond

INF = math.inf


class ModelError(ValueError):
    """Malformed model: bad shape, broken centering, or broken (ID)."""


class PreferentialModel:
    """Finite worlds with one centered modular strict order per world.

    ``rank[w][x]`` is the ranking value of x in w's order: ``y`` is strictly
    preferred to ``z`` from ``w`` iff ``rank[w][y] < rank[w][z]``.  Centering
    demands ``rank[w][w] == 0`` and a positive rank everywhere else.  Ties
    between distinct non-center worlds are allowed.  Instances are treated
    as immutable after construction.
    """

    __slots__ = ("worlds", "rank", "val", "_index")

    def __init__(self, worlds, rank, val):
        self.worlds = tuple(worlds)
        if not self.worlds:
            raise ModelError("model needs at least one world")
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError("duplicate world ids")
        wset = set(self.worlds)
        self.rank = {w: dict(rank[w]) for w in self.worlds}
        for w in self.worlds:
            if set(self.rank[w]) != wset:
                raise ModelError(f"ranking for {w!r} does not cover all worlds")
            if self.rank[w][w] != 0:
                raise ModelError(f"centering violated: rank[{w!r}][{w!r}] != 0")
            for x, r in self.rank[w].items():
                if x != w and r < 1:
                    raise ModelError(
                        f"centering violated: rank[{w!r}][{x!r}] = {r} < 1"
                    )
        self.val = {a: frozenset(ws) for a, ws in val.items()}
        for a, ws in self.val.items():
            if not ws <= wset:
                raise ModelError(f"valuation of {a!r} mentions unknown worlds")
        self._index = {w: i for i, w in enumerate(self.worlds)}

    def __repr__(self):
        return (
            f"PreferentialModel(worlds={self.worlds!r}, rank={self.rank!r}, "
            f"val={self.val!r})"
        )

    def __eq__(self, other):
        return (
            isinstance(other, PreferentialModel)
            and self.worlds == other.worlds
            and self.rank == other.rank
            and self.val == other.val
        )

    def __hash__(self):
        return hash(
            (
                self.worlds,
                tuple(tuple(sorted(self.rank[w].items())) for w in self.worlds),
                tuple(sorted((a, ws) for a, ws in self.val.items())),
            )
        )

    def prefers(self, w, y, z) -> bool:
        """y strictly preferred to z as seen from w."""
        return self.rank[w][y] < self.rank[w][z]

    def min_rank(self, w, xs) -> float:
        """Least ranking value among xs from w; infinity on the empty set."""
        rw = self.rank[w]
        return min((rw[x] for x in xs), default=INF)

    def minimal(self, w, xs) -> frozenset:
        """The set of rank-minimal members of xs as seen from w."""
        m = self.min_rank(w, xs)
        if m is INF:
            return frozenset()
        rw = self.rank[w]
        return frozenset(x for x in xs if rw[x] == m)


class DistanceMinspaceModel:
    """Finite distance model with exact rational distances satisfying (ID).

    Finiteness makes the minimum property automatic; the distance to the
    empty set is represented as floating infinity, which compares exactly
    against Fractions.
    """

    __slots__ = ("worlds", "dist", "val")

    def __init__(self, worlds, dist, val):
        self.worlds = tuple(worlds)
        if not self.worlds:
            raise ModelError("model needs at least one world")
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError("duplicate world ids")
        wset = set(self.worlds)
        self.dist = {
            w: {x: Fraction(dist[w][x]) for x in dist[w]} for w in self.worlds
        }
        for w in self.worlds:
            if set(self.dist[w]) != wset:
                raise ModelError(f"distances from {w!r} do not cover all worlds")
            for x, d in self.dist[w].items():
                if d < 0:
                    raise ModelError("negative distance")
                if (d == 0) != (w == x):
                    raise ModelError(
                        f"(ID) violated between {w!r} and {x!r}: d = {d}"
                    )
        self.val = {a: frozenset(ws) for a, ws in val.items()}
        for a, ws in self.val.items():
            if not ws <= wset:
                raise ModelError(f"valuation of {a!r} mentions unknown worlds")

    def __repr__(self):
        return (
            f"DistanceMinspaceModel(worlds={self.worlds!r}, dist={self.dist!r}, "
            f"val={self.val!r})"
        )

    def set_dist(self, w, xs):
        """Distance from w to a set: minimum member distance, inf if empty."""
        dw = self.dist[w]
        return min((dw[x] for x in xs), default=INF)


@dataclass(frozen=True)
class SatVerdict:
    satisfiable: bool
    witness: Optional[tuple] = None  # (PreferentialModel, world)

    def __post_init__(self):
        if self.satisfiable != (self.witness is not None):
            raise ValueError("witness present iff satisfiable")


# ---------------------------------------------------------------------------
# evaluation


def extension(m: PreferentialModel, f: Formula, memo=None) -> frozenset:
    """The set of worlds of m where f holds."""
    if memo is None:
        memo = {}
    out = memo.get(f)
    if out is not None:
        return out
    if isinstance(f, Atom):
        out = m.val.get(f.name, frozenset())
    elif isinstance(f, Bottom):
        out = frozenset()
    elif isinstance(f, Not):
        out = frozenset(m.worlds) - extension(m, f.arg, memo)
    elif isinstance(f, And):
        out = extension(m, f.left, memo) & extension(m, f.right, memo)
    elif isinstance(f, Sim):
        ea = extension(m, f.left, memo)
        eb = extension(m, f.right, memo)
        out = frozenset(
            w for w in m.worlds if m.min_rank(w, ea) < m.min_rank(w, eb)
        )
    elif isinstance(f, Cond):
        ea = extension(m, f.left, memo)
        eb = extension(m, f.right, memo)
        out = frozenset(x for x in m.worlds if m.minimal(x, ea) <= eb)
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def eval_pref(m: PreferentialModel, w, f: Formula, memo=None) -> bool:
    """Truth of f at world w of a preferential model."""
    if w not in m.rank:
        raise ModelError(f"unknown world {w!r}")
    return w in extension(m, f, memo)


def eval_box(m: PreferentialModel, w, x, f: Formula, memo=None) -> bool:
    """Truth of the indexed box: f holds at every world strictly below x
    in w's order."""
    if w not in m.rank or x not in m.rank:
        raise ModelError("unknown world id")
    ext = extension(m, f, memo)
    bound = m.rank[w][x]
    return all(y in ext for y in m.worlds if m.rank[w][y] < bound)


def extension_dist(m: DistanceMinspaceModel, f: Formula, memo=None) -> frozenset:
    if memo is None:
        memo = {}
    out = memo.get(f)
    if out is not None:
        return out
    if isinstance(f, Atom):
        out = m.val.get(f.name, frozenset())
    elif isinstance(f, Bottom):
        out = frozenset()
    elif isinstance(f, Not):
        out = frozenset(m.worlds) - extension_dist(m, f.arg, memo)
    elif isinstance(f, And):
        out = extension_dist(m, f.left, memo) & extension_dist(m, f.right, memo)
    elif isinstance(f, Sim):
        ea = extension_dist(m, f.left, memo)
        eb = extension_dist(m, f.right, memo)
        out = frozenset(
            w for w in m.worlds if m.set_dist(w, ea) < m.set_dist(w, eb)
        )
    elif isinstance(f, Cond):
        raise ValueError("distance evaluation expects a ~>-free formula")
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def eval_dist(m: DistanceMinspaceModel, w, f: Formula, memo=None) -> bool:
    """Truth of f at world w of a distance model (f must be ~>-free)."""
    if w not in m.dist:
        raise ModelError(f"unknown world {w!r}")
    return w in extension_dist(m, f, memo)


# ---------------------------------------------------------------------------
# conversions between the two model kinds


def dist_to_pref(m: DistanceMinspaceModel) -> PreferentialModel:
    """Orders from distances: y preferred to z from w iff d(w,y) < d(w,z).

    Ranks are assigned 0,1,2,... along the sorted distinct distances, so
    equal distances collapse to equal ranks.
    """
    rank = {}
    for w in m.worlds:
        dw = m.dist[w]
        levels = sorted(set(dw.values()))
        level_of = {d: i for i, d in enumerate(levels)}
        rank[w] = {x: level_of[dw[x]] for x in m.worlds}
    return PreferentialModel(m.worlds, rank, m.val)


def pref_to_dist(m: PreferentialModel) -> DistanceMinspaceModel:
    """Distances from rankings: d(w,w) = 0 and d(w,x) = rank otherwise.

    Centering makes non-center ranks >= 1, so (ID) holds by construction;
    a malformed input is rejected by the model constructor.
    """
    dist = {
        w: {x: Fraction(0 if x == w else m.rank[w][x]) for x in m.worlds}
        for w in m.worlds
    }
    return DistanceMinspaceModel(m.worlds, dist, m.val)


# ---------------------------------------------------------------------------
# enumeration and the oracle


def world_names(n: int) -> tuple:
    return tuple(f"w{i}" for i in range(n))


def enumerate_models(atoms, max_worlds: int) -> Iterator[PreferentialModel]:
    """Every preferential model with at most max_worlds worlds, raw form.

    For each world count n, each family of rankings with rank[w][w] = 0 and
    rank[w][x] in 1..n-1 otherwise, and each valuation of the given atoms,
    in a fixed deterministic order.  No isomorphism reduction.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be >= 1")
    atoms = sorted(atoms)
    for n in range(1, max_worlds + 1):
        worlds = world_names(n)
        others = {w: tuple(x for x in worlds if x != w) for w in worlds}
        per_world = list(itertools.product(range(1, n), repeat=n - 1))
        if n == 1:
            per_world = [()]
        for family in itertools.product(per_world, repeat=n):
            rank = {}
            for w, ranks in zip(worlds, family):
                rw = {w: 0}
                for x, r in zip(others[w], ranks):
                    rw[x] = r
                rank[w] = rw
            for masks in itertools.product(range(2 ** n), repeat=len(atoms)):
                val = {
                    a: frozenset(
                        worlds[i] for i in range(n) if mask >> i & 1
                    )
                    for a, mask in zip(atoms, masks)
                }
                yield PreferentialModel(worlds, rank, val)


def count_models(n_atoms: int, max_worlds: int) -> int:
    """Closed-form count matching enumerate_models, used as a cross-check."""
    total = 0
    for n in range(1, max_worlds + 1):
        rankings = max(n - 1, 1) ** (n - 1) if n > 1 else 1
        total += (rankings ** n) * (2 ** (n * n_atoms))
    return total


def oracle_sat(
    f: Formula, max_worlds: int, models: Optional[Iterable] = None
) -> SatVerdict:
    """Exhaustive satisfiability search over models of bounded size.

    A negative verdict only means no model with at most max_worlds worlds
    satisfies f; it is not an unsatisfiability proof.  ``models`` can supply
    a pre-built model sequence (they are immutable and safely shared).
    """
    if has_cond(f):
        raise ValueError("oracle expects a ~>-free formula; translate first")
    if models is None:
        models = enumerate_models(atom_names(f), max_worlds)
    for m in models:
        ext = extension(m, f)
        if ext:
            return SatVerdict(True, (m, min(ext)))
    return SatVerdict(False, None)


def valid_in_model(m: PreferentialModel, f: Formula, memo=None) -> bool:
    return len(extension(m, f, memo)) == len(m.worlds)


# ---------------------------------------------------------------------------
# JSON model files


def model_to_obj(m, root=None) -> dict:
    """JSON-ready dict for either model kind; optional designated world."""
    obj = {"worlds": list(m.worlds)}
    if isinstance(m, PreferentialModel):
        obj["rank"] = {w: dict(m.rank[w]) for w in m.worlds}
    elif isinstance(m, DistanceMinspaceModel):
        obj["dist"] = {
            w: {
                x: f"{d.numerator}/{d.denominator}"
                for x, d in m.dist[w].items()
            }
            for w in m.worlds
        }
    else:
        raise TypeError(f"not a model: {m!r}")
    obj["val"] = {a: sorted(ws) for a, ws in sorted(m.val.items())}
    if root is not None:
        obj["root"] = root
    return obj


def model_from_obj(obj: dict):
    """Parse the JSON model format; dispatches on the rank/dist key."""
    try:
        worlds = list(obj["worlds"])
        val = {a: frozenset(ws) for a, ws in obj.get("val", {}).items()}
        if "rank" in obj:
            rank = {w: {x: int(r) for x, r in rw.items()} for w, rw in obj["rank"].items()}
            return PreferentialModel(worlds, rank, val)
        if "dist" in obj:
            dist = {
                w: {x: Fraction(d) for x, d in dw.items()}
                for w, dw in obj["dist"].items()
            }
            return DistanceMinspaceModel(worlds, dist, val)
    except ModelError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"bad model file: {e}") from e
    raise ModelError("model file needs a 'rank' or 'dist' field")
