"""Permutation actions generated by explicit maps, and their orbit counts.

The key quantity is d_ij, the number of orbits of the vertex stabiliser H_w
on pairs Delta_i(w) x Delta_j(w).  It equals the number of H-orbits on
triples (x, a, b) with a in Delta_i(x), b in Delta_j(x) when H is
transitive, and it is the dimension of the (i, j) block of the centraliser
algebra of H_w.

Rather than walking all triples, each triple is moved into the fibre over the
base vertex by a transversal element; the edges of the triple graph then
become the Schreier generators of H_w acting on pairs.  Pair orbits are found
by vectorised union-find.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .quadspace import LinMap
from .srg import SrgInstance

MAX_TRIPLES = 1 << 32


class ActionError(ValueError):
    """A generator is not a permutation or does not preserve adjacency."""


@dataclass
class GenAction:
    n: int
    gens: list[np.ndarray]
    labels: list[str]
    _stab: dict = field(default_factory=dict, repr=False, compare=False)

    def shuffled(self, seed: int) -> "GenAction":
        order = list(range(len(self.gens)))
        random.Random(seed).shuffle(order)
        return GenAction(self.n, [self.gens[i] for i in order], [self.labels[i] for i in order])

    def extended(self, gens, labels) -> "GenAction":
        return GenAction(self.n, self.gens + list(gens), self.labels + list(labels))


def _check_perm(perm: np.ndarray, n: int) -> None:
    if perm.shape != (n,) or not np.array_equal(np.sort(perm), np.arange(n)):
        raise ActionError("generator is not a bijection of the vertex set")


def action_from_perms(g: SrgInstance, perms, labels=None) -> GenAction:
    """Wrap explicit permutations, certifying each one as an automorphism of g."""
    gens = []
    labels = list(labels) if labels is not None else [f"g{i}" for i in range(len(perms))]
    for perm, label in zip(perms, labels):
        perm = np.asarray(perm, dtype=np.int64)
        _check_perm(perm, g.v)
        if not np.array_equal(g.adj[np.ix_(perm, perm)], g.adj):
            raise ActionError(f"generator {label!r} does not preserve adjacency")
        gens.append(perm)
    return GenAction(g.v, gens, labels)


def map_to_perm(lm: LinMap, g: SrgInstance) -> np.ndarray:
    space = g.space
    ctx = space.ctx
    images = lm.apply_rows(ctx, g.coords)
    if space.kind == "qminus5":
        if np.any(np.all(images == 0, axis=1)):
            raise ActionError(f"map {lm.label!r} is singular on a vertex")
        images = space.normalize_rows(images)
    lookup = np.full(ctx.q**space.dim, -1, dtype=np.int64)
    lookup[space.encode(g.coords)] = np.arange(g.v)
    perm = lookup[space.encode(images)]
    if np.any(perm < 0):
        raise ActionError(f"map {lm.label!r} sends a vertex outside the vertex set")
    return perm


def induce_action(maps: list[LinMap], g: SrgInstance) -> GenAction:
    """Permutation action of the given maps on the vertices of a polar graph."""
    return action_from_perms(g, [map_to_perm(lm, g) for lm in maps], [lm.label for lm in maps])


# -- orbits on points --------------------------------------------------------------

def _components(n: int, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    return connected_components(graph, directed=True, connection="weak")[1]


def orbit_count_points(action: GenAction, subset=None) -> tuple[int, list[list[int]]]:
    """Orbits of the generated group on an invariant subset (default: all points)."""
    n = action.n
    subset = np.arange(n) if subset is None else np.asarray(sorted(set(int(s) for s in subset)))
    member = np.zeros(n, dtype=bool)
    member[subset] = True
    for perm, label in zip(action.gens, action.labels):
        if not np.all(member[perm[subset]]):
            raise ActionError(f"subset is not invariant under {label!r}")
    src = np.concatenate([np.arange(n)] + [np.arange(n) for _ in action.gens])
    dst = np.concatenate([np.arange(n)] + list(action.gens))
    comp = _components(n, src, dst)
    classes: dict[int, list[int]] = {}
    for x in subset:
        classes.setdefault(int(comp[x]), []).append(int(x))
    parts = sorted(classes.values())
    return len(parts), parts


# -- stabiliser of a point -----------------------------------------------------------

def transversal(action: GenAction, root: int) -> dict[int, np.ndarray]:
    """BFS transversal: u[x] is a group element (as a permutation) with u[x][root] = x."""
    ident = np.arange(action.n)
    u = {root: ident}
    frontier = [root]
    while frontier:
        nxt = []
        for x in frontier:
            for g in action.gens:
                y = int(g[x])
                if y not in u:
                    u[y] = g[u[x]]
                    nxt.append(y)
        frontier = nxt
    return u


def stabilizer_generators(action: GenAction, root: int) -> list[np.ndarray]:
    """Schreier generators of the stabiliser of ``root``, deduplicated, identity dropped."""
    if root in action._stab:
        return action._stab[root]
    u = transversal(action, root)
    inv = {}
    for x, p in u.items():
        q = np.empty_like(p)
        q[p] = np.arange(len(p))
        inv[x] = q
    ident = np.arange(action.n)
    seen = {ident.tobytes()}
    out = []
    for x in sorted(u):
        for g in action.gens:
            s = inv[int(g[x])][g[u[x]]]
            key = s.tobytes()
            if key not in seen:
                seen.add(key)
                out.append(s)
    action._stab[root] = out
    return out


def pair_orbits(gens: list[np.ndarray], rows: np.ndarray, cols: np.ndarray, n: int,
                lower_bound: int = 0) -> tuple[int, np.ndarray]:
    """Orbits on rows x cols of the group generated by ``gens`` (which must fix both sets).

    Returns (count, labels) where labels[r, c] is the smallest flat index in
    the orbit of pair (rows[r], cols[c]).  Once the count reaches
    ``lower_bound`` the remaining generators are skipped: orbits only ever
    merge, so a count at a known lower bound is already final.
    """
    rows = np.asarray(rows)
    cols = np.asarray(cols)
    nr, nc = len(rows), len(cols)
    size = nr * nc
    if size > MAX_TRIPLES:
        raise MemoryError("pair set too large")
    rank_r = np.full(n, -1, dtype=np.int64)
    rank_r[rows] = np.arange(nr)
    rank_c = np.full(n, -1, dtype=np.int64)
    rank_c[cols] = np.arange(nc)
    labels = np.arange(size, dtype=np.int64)
    count = size
    for s in gens:
        if count <= lower_bound:
            break
        ra = rank_r[s[rows]]
        rb = rank_c[s[cols]]
        if np.any(ra < 0) or np.any(rb < 0):
            raise ActionError("stabiliser element does not preserve the subconstituents")
        img = (ra[:, None] * nc + rb[None, :]).ravel()
        li = labels[img]
        diff = labels != li
        if not diff.any():
            continue
        comp = _components(size, labels[diff], li[diff])
        rep = np.full(comp.max() + 1, size, dtype=np.int64)
        np.minimum.at(rep, comp, np.arange(size))
        labels = rep[comp[labels]]
        count = int(np.count_nonzero(labels == np.arange(size)))
    return count, labels.reshape(nr, nc)


def _relation_lower_bound(g: SrgInstance, rows, cols) -> int:
    rel = g.relation()[np.ix_(rows, cols)]
    return len(np.unique(rel))


def stabilizer_orbits_via_triples(action: GenAction, g: SrgInstance, i: int, j: int,
                                  base: int | None = None, early_stop: bool = True):
    """Number of H_w-orbits on Delta_i(w) x Delta_j(w) (the block dimension d_ij).

    Returns (count, labels) with labels indexed by ranks within Delta_i, Delta_j.
    """
    base = g.base if base is None else base
    rows = g.subconstituent(i, base)
    cols = g.subconstituent(j, base)
    if action.n * len(rows) * len(cols) > MAX_TRIPLES:
        raise MemoryError("triple set exceeds 2^32")
    gens = stabilizer_generators(action, base)
    bound = _relation_lower_bound(g, rows, cols) if early_stop else 0
    return pair_orbits(gens, rows, cols, g.v, lower_bound=bound)


@dataclass
class BlockDecomp:
    d: list[list[int]]
    transitive: bool
    labels: dict = field(default_factory=dict, repr=False)

    @property
    def total(self) -> int:
        return sum(map(sum, self.d))

    @property
    def r1(self) -> int:
        return self.d[1][1]

    @property
    def r2(self) -> int:
        return self.d[2][2]

    @property
    def t(self) -> int:
        return self.d[1][2]

    @property
    def rank3(self) -> bool:
        return self.transitive and all(self.d[0][j] == 1 and self.d[j][0] == 1 for j in range(3))

    def as_dict(self) -> dict:
        return {"d": self.d, "total": self.total, "r1": self.r1, "r2": self.r2, "t": self.t,
                "rank3": self.rank3, "transitive": self.transitive}


def block_decomposition(action: GenAction, g: SrgInstance, early_stop: bool = True) -> BlockDecomp:
    """3x3 matrix of H_w-orbit counts on Delta_i x Delta_j."""
    d = [[0] * 3 for _ in range(3)]
    labels = {}
    for i in range(3):
        for j in range(3):
            d[i][j], labels[i, j] = stabilizer_orbits_via_triples(action, g, i, j,
                                                                   early_stop=early_stop)
    for i in range(3):
        for j in range(i):
            if d[i][j] != d[j][i]:
                raise AssertionError(f"d[{i}][{j}]={d[i][j]} != d[{j}][{i}]={d[j][i]}")
    n_orbits, _ = orbit_count_points(action)
    bd = BlockDecomp(d, n_orbits == 1, labels)
    if bd.rank3 and bd.total != 5 + bd.r1 + bd.r2 + 2 * bd.t:
        raise AssertionError("rank-3 block total inconsistent")
    return bd


def two_point_partition(bd: BlockDecomp, g: SrgInstance, i: int, j: int) -> list[frozenset]:
    """Orbits of the stabiliser of (w, w_i) on Delta_j, read off the pair-orbit labels.

    (w_i, b) and (w_i, b') share an H_w-orbit exactly when some element of
    H_w fixes w_i and sends b to b'.
    """
    rows = g.subconstituent(i)
    cols = g.subconstituent(j)
    anchor = g.omega1 if i == 1 else g.omega2
    r = int(np.flatnonzero(rows == anchor)[0])
    row = bd.labels[i, j][r]
    classes: dict[int, set] = {}
    for c, lab in enumerate(row):
        classes.setdefault(int(lab), set()).add(int(cols[c]))
    return sorted((frozenset(s) for s in classes.values()), key=lambda s: (len(s), min(s)))


# -- named subsets -----------------------------------------------------------------

@dataclass
class NamedCheck:
    name: str
    expected: dict[str, int]
    observed: list[int]
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "expected": self.expected, "observed": self.observed,
                "passed": self.passed}


def _partition_check(name, named: dict[str, set], observed: list[frozenset]) -> NamedCheck:
    expect = sorted((frozenset(s) for s in named.values()), key=lambda s: (len(s), min(s)))
    ok = all(named.values()) and set(expect) == set(observed)
    return NamedCheck(name, {k: len(s) for k, s in named.items()}, sorted(len(s) for s in observed), ok)


def _union_check(name, parts: dict[str, set], target: set, observed: list[frozenset]) -> NamedCheck:
    union = set().union(*parts.values())
    ok = all(parts.values()) and union == target and frozenset(target) in set(observed)
    return NamedCheck(name, {k: len(s) for k, s in parts.items()}, sorted(len(s) for s in observed), ok)


def qminus_named_sets(g: SrgInstance) -> dict[str, set]:
    space, ctx, pts = g.space, g.space.ctx, g.coords
    d1, d2 = set(map(int, g.delta1)), set(map(int, g.delta2))
    sets = {}
    sets["Z1"] = {x for x in d1 if pts[x][0] == 0}
    sets["Z2"] = d1 - sets["Z1"]
    sets["X1"] = {g.omega2}
    sets["X2"] = {x for x in d2 if pts[x][0] == 0} - sets["X1"]
    sets["X3"] = {x for x in d2 if pts[x][0] != 0}
    nbrs = set(map(int, np.flatnonzero(g.adj[g.omega1])))
    sets["Gamma1"] = d1 & nbrs
    sets["Gamma2"] = d1 - nbrs - {g.omega1}
    sets["omega1"] = {g.omega1}
    if ctx.p != 2:
        qw = {x: space.eval_Q((0, 0) + tuple(int(c) for c in pts[x][2:])) for x in sets["X3"]}
        sets["S1"] = {x for x, val in qw.items() if ctx.is_square(val)}
        sets["S2"] = {x for x, val in qw.items() if not ctx.is_square(val)}
    return sets


def vo_named_sets(g: SrgInstance) -> dict[str, set]:
    space, pts = g.space, g.coords
    d1 = set(map(int, g.delta1))
    sets = {}
    common = set(map(int, np.flatnonzero(g.adj[g.base] & g.adj[g.omega2])))
    sets["Gamma1"] = d1 & common
    sets["Gamma2"] = d1 - common

    def tail_q(x):
        return space.eval_Q((0, 0) + tuple(int(c) for c in pts[x][2:]))

    def head(x):
        return (int(pts[x][0]), int(pts[x][1]))

    nonzero_tail = {x for x in range(g.v) if pts[x][2:].any()}
    z1 = {x for x in nonzero_tail if head(x) == (1, 0) and tail_q(x) == 0}
    z2 = {x for x in nonzero_tail if head(x) == (0, 1) and tail_q(x) == 0}
    e1 = g.index_of(space.basis(1))
    e2 = g.index_of(space.basis(2))
    sets["Z1'"] = z1 | {e1}
    sets["Z2'"] = z2 | {e2}
    sets["S1"] = {x for x in nonzero_tail if head(x) == (0, 0) and tail_q(x) == 0}
    sets["S2"] = {x for x in range(g.v) if head(x) == (1, 1) and tail_q(x) == 1}
    return sets


def named_subset_orbit_check(action: GenAction, g: SrgInstance,
                             bd: BlockDecomp | None = None) -> list[NamedCheck]:
    """Compare two-point-stabiliser orbits with the explicitly described subsets."""
    bd = bd if bd is not None else block_decomposition(action, g)
    kind = g.descriptor.get("kind")
    checks = []
    if kind == "qminus5":
        s = qminus_named_sets(g)
        h2_d1 = two_point_partition(bd, g, 2, 1)
        h2_d2 = two_point_partition(bd, g, 2, 2)
        h1_d1 = two_point_partition(bd, g, 1, 1)
        checks.append(_partition_check("H2 on Delta1: Z1, Z2", {k: s[k] for k in ("Z1", "Z2")}, h2_d1))
        checks.append(_partition_check("H2 on Delta2: X1, X2, X3",
                                       {k: s[k] for k in ("X1", "X2", "X3")}, h2_d2))
        checks.append(_partition_check("H1 on Delta1: omega1, Gamma1, Gamma2",
                                       {k: s[k] for k in ("omega1", "Gamma1", "Gamma2")}, h1_d1))
        if "S1" in s:
            checks.append(_union_check("X3 = S1 u S2 is one H2-orbit",
                                       {k: s[k] for k in ("S1", "S2")}, s["X3"], h2_d2))
    elif kind == "vo":
        if g.space.m < 3:
            raise ValueError("the named VO subsets are only defined for m >= 3")
        s = vo_named_sets(g)
        h2_d1 = two_point_partition(bd, g, 2, 1)
        checks.append(_partition_check("H2 on Delta1: Gamma1, Gamma2",
                                       {k: s[k] for k in ("Gamma1", "Gamma2")}, h2_d1))
        checks.append(_union_check("Gamma1 = Z1' u Z2' is one H2-orbit",
                                   {k: s[k] for k in ("Z1'", "Z2'")}, s["Gamma1"], h2_d1))
        checks.append(_union_check("Gamma2 = S1 u S2 is one H2-orbit",
                                   {k: s[k] for k in ("S1", "S2")}, s["Gamma2"], h2_d1))
    else:
        raise ValueError(f"no named subsets for {g.name}")
    return checks


def rho_fuses(g: SrgInstance) -> bool:
    """The similarity rho maps S1 onto S2 (odd q only)."""
    perm = map_to_perm(g.space.witness_rho_similarity(), g)
    s = qminus_named_sets(g)
    return {int(perm[x]) for x in s["S1"]} == s["S2"] and int(perm[g.base]) == g.base \
        and int(perm[g.omega2]) == g.omega2


def partition_rows(g: SrgInstance, bd: BlockDecomp, i: int, j: int) -> list[tuple[int, int, int]]:
    """(class, representative vertex, size) rows of a two-point-stabiliser partition."""
    parts = two_point_partition(bd, g, i, j)
    return [(k, min(p), len(p)) for k, p in enumerate(parts)]


# -- group order -------------------------------------------------------------------

def schreier_order(action: GenAction, max_degree: int = 400) -> int:
    """Exact order of the generated group via a deterministic Schreier-Sims chain."""
    if action.n > max_degree:
        raise ValueError(f"degree {action.n} exceeds {max_degree}")
    return StabChain(action.n, action.gens).order()


class StabChain:
    """Base and strong generating set from the deterministic Schreier-Sims algorithm.

    Permutations are tuples p with p[i] the image of i; ``a * b`` means a first.
    """

    def __init__(self, n: int, gens):
        self.n = n
        self.ident = tuple(range(n))
        self.strong = [g for g in (tuple(int(x) for x in g) for g in gens) if g != self.ident]
        self.base: list[int] = []
        for g in self.strong:
            if all(g[b] == b for b in self.base):
                self.base.append(next(i for i in range(n) if g[i] != i))
        self.level_gens: list[list[tuple]] = []
        self.trans: list[dict[int, tuple]] = []
        self._refresh(0)
        self._run()

    @staticmethod
    def _mul(a, b):
        return tuple(b[x] for x in a)

    @staticmethod
    def _inv(a):
        out = [0] * len(a)
        for i, x in enumerate(a):
            out[x] = i
        return tuple(out)

    def _refresh(self, start: int) -> None:
        del self.level_gens[start:]
        del self.trans[start:]
        for level in range(start, len(self.base)):
            fixed = self.base[:level]
            gens = [s for s in self.strong if all(s[b] == b for b in fixed)]
            self.level_gens.append(gens)
            b = self.base[level]
            t = {b: self.ident}
            frontier = [b]
            while frontier:
                nxt = []
                for x in frontier:
                    for s in gens:
                        y = s[x]
                        if y not in t:
                            t[y] = self._mul(t[x], s)
                            nxt.append(y)
                frontier = nxt
            self.trans.append(t)

    def sift(self, g, start: int = 0):
        for level in range(start, len(self.base)):
            beta = g[self.base[level]]
            if beta not in self.trans[level]:
                return g, level
            g = self._mul(g, self._inv(self.trans[level][beta]))
        return g, len(self.base)

    def _run(self) -> None:
        i = len(self.base) - 1
        while i >= 0:
            restart = None
            for beta, u in list(self.trans[i].items()):
                for x in self.level_gens[i]:
                    h = self._mul(self._mul(u, x), self._inv(self.trans[i][x[beta]]))
                    y, j = self.sift(h, i + 1)
                    if y != self.ident:
                        if j == len(self.base):
                            self.base.append(next(p for p in range(self.n) if y[p] != p))
                        self.strong.append(y)
                        self._refresh(i + 1)
                        restart = j
                        break
                if restart is not None:
                    break
            i = restart if restart is not None else i - 1

    def order(self) -> int:
        out = 1
        for t in self.trans:
            out *= len(t)
        return out

    def contains(self, g) -> bool:
        y, _ = self.sift(tuple(int(x) for x in g))
        return y == self.ident
