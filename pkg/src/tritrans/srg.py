"""Strongly regular graphs: construction, parameter checks, relation matrices.

Vertices are indexed 0..v-1 in the order documented for each constructor.
Adjacency is a symmetric boolean numpy matrix with a zero diagonal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .gf import field_of_order
from .quadspace import QuadSpace, qminus5_space, vo_space

MAX_VERTICES = 5000


class SrgError(ValueError):
    """A graph failed a strong-regularity invariant."""


@dataclass
class SrgInstance:
    name: str
    adj: np.ndarray
    params: tuple[int, int, int, int]
    base: int = 0
    omega1: int | None = None
    omega2: int | None = None
    coords: np.ndarray | None = None
    space: QuadSpace | None = None
    descriptor: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.omega1 is None:
            self.omega1 = int(self.delta1[0])
        if self.omega2 is None:
            self.omega2 = int(self.delta2[0])

    @property
    def v(self) -> int:
        return self.adj.shape[0]

    @property
    def primitive(self) -> bool:
        _, k, lam, mu = self.params
        return lam < k - 1 and mu < k

    @cached_property
    def delta1(self) -> np.ndarray:
        return np.flatnonzero(self.adj[self.base])

    @cached_property
    def delta2(self) -> np.ndarray:
        row = self.adj[self.base].copy()
        row[self.base] = True
        return np.flatnonzero(~row)

    def subconstituent(self, i: int, x: int | None = None) -> np.ndarray:
        x = self.base if x is None else x
        if i == 0:
            return np.array([x])
        if i == 1:
            return np.flatnonzero(self.adj[x])
        row = self.adj[x].copy()
        row[x] = True
        return np.flatnonzero(~row)

    def complement_adj(self) -> np.ndarray:
        """Adjacency of the complement graph, computed on demand."""
        out = ~self.adj
        np.fill_diagonal(out, False)
        return out

    def relation(self) -> np.ndarray:
        """v x v matrix with entry i where (x, y) lies in R_i."""
        rel = np.where(self.adj, 1, 2).astype(np.int8)
        np.fill_diagonal(rel, 0)
        return rel

    def rel_matrices(self, base: int | None = None) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """([A0, A1, A2], [E0, E1, E2]) as int64 matrices for the given base vertex."""
        base = self.base if base is None else base
        v = self.v
        a1 = self.adj.astype(np.int64)
        a0 = np.eye(v, dtype=np.int64)
        a2 = 1 - a0 - a1
        rel_row = self.relation()[base]
        es = [np.diag((rel_row == i).astype(np.int64)) for i in range(3)]
        return [a0, a1, a2], es

    def vertex_label(self, i: int) -> str:
        if self.coords is None:
            return str(int(i))
        return "(" + ",".join(str(int(c)) for c in self.coords[i]) + ")"

    def index_of(self, coords) -> int:
        """Index of the vertex with these coordinates (normalised for projective points)."""
        if self.coords is None:
            raise ValueError("instance has no coordinates")
        return coord_index(self.coords, self.space, coords)


def coord_index(points: np.ndarray, space: QuadSpace | None, coords) -> int:
    row = np.asarray([coords], dtype=np.int64)
    if space is not None and space.kind == "qminus5":
        row = space.normalize_rows(row)
    hits = np.flatnonzero(np.all(points == row, axis=1))
    if len(hits) != 1:
        raise KeyError(f"{tuple(int(c) for c in coords)} is not a vertex")
    return int(hits[0])


def measure_params(adj: np.ndarray) -> tuple[int, int, int, int]:
    """Exhaustively measure (v, k, lam, mu), raising SrgError if not an SRG."""
    adj = np.asarray(adj, dtype=bool)
    v = adj.shape[0]
    if adj.shape != (v, v):
        raise SrgError("adjacency matrix is not square")
    if np.any(adj != adj.T):
        raise SrgError("adjacency matrix is not symmetric")
    if np.any(np.diag(adj)):
        raise SrgError("adjacency matrix has loops")
    deg = adj.sum(axis=1)
    if np.any(deg != deg[0]):
        raise SrgError("graph is not regular")
    k = int(deg[0])
    a = adj.astype(np.float64)
    common = (a @ a).round().astype(np.int64)
    off = ~np.eye(v, dtype=bool)
    lam_vals = np.unique(common[adj])
    mu_vals = np.unique(common[~adj & off])
    if len(lam_vals) > 1 or len(mu_vals) > 1:
        raise SrgError(f"common neighbour counts not constant: {lam_vals}, {mu_vals}")
    lam = int(lam_vals[0]) if len(lam_vals) else 0
    mu = int(mu_vals[0]) if len(mu_vals) else 0
    return v, k, lam, mu


def verify_srg(g: SrgInstance) -> None:
    """Check the stored parameters and the identity A^2 = kI + lam A + mu (J - I - A)."""
    measured = measure_params(g.adj)
    if measured != tuple(g.params):
        raise SrgError(f"{g.name}: measured parameters {measured} != expected {g.params}")
    v, k, lam, mu = measured
    a = g.adj.astype(np.int64)
    i = np.eye(v, dtype=np.int64)
    lhs = (g.adj.astype(np.float64) @ g.adj.astype(np.float64)).round().astype(np.int64)
    if not np.array_equal(lhs, k * i + lam * a + mu * (1 - i - a)):
        raise SrgError(f"{g.name}: A^2 identity fails")
    if len(g.delta1) != k or len(g.delta2) != v - k - 1:
        raise SrgError(f"{g.name}: subconstituent sizes wrong")


def _finish(g: SrgInstance) -> SrgInstance:
    if g.v > MAX_VERTICES:
        raise ValueError(f"{g.v} vertices exceeds the desk-scale bound")
    verify_srg(g)
    return g


# -- the two polar families ----------------------------------------------------

def qminus_params(q: int) -> tuple[int, int, int, int]:
    return (q + 1) * (q**3 + 1), q * (q * q + 1), q - 1, q * q + 1


def vo_params(m: int, eps: int) -> tuple[int, int, int, int]:
    return (
        2 ** (2 * m),
        (2**m - eps) * (2 ** (m - 1) + eps),
        2 * (2 ** (m - 1) - eps) * (2 ** (m - 2) + eps),
        2 ** (m - 1) * (2 ** (m - 1) + eps),
    )


def build_qminus_graph(q: int) -> SrgInstance:
    """Collinearity graph of the elliptic quadric in PG(5, q)."""
    if q not in (2, 3, 4, 5):
        raise ValueError(f"q={q} outside the supported range 2..5")
    space = qminus5_space(q)
    pts = space.enumerate_points()
    adj = space.B_matrix(pts, pts) == 0
    np.fill_diagonal(adj, False)
    base, w1, w2 = (coord_index(pts, space, space.basis(i)) for i in (1, 3, 2))
    g = SrgInstance(f"qminus5(q={q})", adj, qminus_params(q), base=base, omega1=w1, omega2=w2,
                    coords=pts, space=space, descriptor={"kind": "qminus5", "q": q})
    return _finish(g)


def build_vo_graph(m: int, eps: int) -> SrgInstance:
    """Affine polar graph on GF(2)^(2m): u ~ w iff Q(u - w) = 0."""
    if m not in (2, 3, 4) or eps not in (1, -1):
        raise ValueError(f"(m, eps)=({m}, {eps}) outside the supported range")
    space = vo_space(m, eps)
    vecs = space.all_vectors()
    qvals = space.Q_rows(vecs)
    codes = np.arange(len(vecs))
    adj = qvals[codes[:, None] ^ codes[None, :]] == 0
    np.fill_diagonal(adj, False)
    e1, e2 = np.array(space.basis(1)), np.array(space.basis(2))
    base, w1, w2 = (coord_index(vecs, space, x) for x in (np.zeros(2 * m, dtype=int), e1, e1 ^ e2))
    g = SrgInstance(f"vo(m={m},eps={eps:+d})", adj, vo_params(m, eps), base=base, omega1=w1,
                    omega2=w2, coords=vecs, space=space,
                    descriptor={"kind": "vo", "m": m, "eps": eps})
    return _finish(g)


# -- reference families ----------------------------------------------------------

def _from_adj(name, adj, descriptor) -> SrgInstance:
    adj = np.asarray(adj, dtype=bool)
    g = SrgInstance(name, adj, measure_params(adj), descriptor=descriptor)
    return _finish(g)


def cycle5() -> SrgInstance:
    i = np.arange(5)
    d = (i[:, None] - i[None, :]) % 5
    return _from_adj("cycle5", (d == 1) | (d == 4), {"kind": "reference", "family": "cycle5"})


def grid(n: int) -> SrgInstance:
    """n x n rook graph; vertex r*n + c is cell (r, c)."""
    if n < 2 or n * n > 100:
        raise ValueError("grid size outside 2..10")
    r, c = np.divmod(np.arange(n * n), n)
    adj = (r[:, None] == r[None, :]) ^ (c[:, None] == c[None, :])
    return _from_adj(f"grid({n})", adj, {"kind": "reference", "family": "grid", "n": n})


def complete_multipartite(n: int, m: int) -> SrgInstance:
    """n parts of size m; vertex i lies in part i // m."""
    if n < 2 or m < 1 or n * m > 100:
        raise ValueError("complete multipartite size outside range")
    part = np.arange(n * m) // m
    adj = part[:, None] != part[None, :]
    return _from_adj(f"complete_multipartite({n},{m})", adj,
                     {"kind": "reference", "family": "complete_multipartite", "n": n, "m": m})


def paley(q: int) -> SrgInstance:
    """Paley graph on GF(q), q = 1 mod 4; vertex i is the field element with code i."""
    if q % 4 != 1:
        raise ValueError("Paley graphs need q = 1 mod 4")
    ctx = field_of_order(q)
    squares = ctx.squares()
    sub = np.array([[ctx.sub(a, b) for b in range(q)] for a in range(q)])
    adj = np.isin(sub, list(squares))
    return _from_adj(f"paley({q})", adj, {"kind": "reference", "family": "paley", "q": q})


def petersen() -> SrgInstance:
    """Kneser graph K(5, 2); vertices are 2-subsets of {0..4} in lexicographic order."""
    subsets = list(itertools.combinations(range(5), 2))
    adj = [[not set(a) & set(b) for b in subsets] for a in subsets]
    return _from_adj("petersen", adj, {"kind": "reference", "family": "petersen"})


def parse_family(family: str) -> tuple[str, tuple[int, ...]]:
    """'grid(3)' -> ('grid', (3,)); 'paley9' -> ('paley', (9,))."""
    family = family.strip().replace(" ", "")
    if "(" in family:
        name, rest = family.split("(", 1)
        if not rest.endswith(")"):
            raise ValueError(f"malformed family {family!r}")
        args = tuple(int(a) for a in rest[:-1].split(",") if a)
    else:
        name = family.rstrip("0123456789")
        args = (int(family[len(name):]),) if family[len(name):] else ()
    return name, args


def build_reference(family: str) -> SrgInstance:
    name, args = parse_family(family)
    if name == "cycle" and args == (5,):
        return cycle5()
    if name == "grid" and len(args) == 1:
        return grid(*args)
    if name == "complete_multipartite" and len(args) == 2:
        return complete_multipartite(*args)
    if name == "paley" and len(args) == 1:
        return paley(*args)
    if name == "petersen" and not args:
        return petersen()
    raise ValueError(f"unknown reference family {family!r}")


def reference_generators(g: SrgInstance) -> list[tuple[str, np.ndarray]]:
    """Automorphism generators (label, permutation) for a reference family."""
    d = g.descriptor
    fam = d.get("family")
    v = g.v
    if fam == "cycle5":
        i = np.arange(5)
        return [("rotate", (i + 1) % 5), ("reflect", (-i) % 5)]
    if fam == "grid":
        n = d["n"]
        r, c = np.divmod(np.arange(v), n)
        gens = []
        for name, rr in (("row-cycle", (r + 1) % n), ("row-swap", np.where(r < 2, 1 - r, r))):
            gens.append((name, rr * n + c))
        for name, cc in (("col-cycle", (c + 1) % n), ("col-swap", np.where(c < 2, 1 - c, c))):
            gens.append((name, r * n + cc))
        gens.append(("transpose", c * n + r))
        return gens
    if fam == "complete_multipartite":
        n, m = d["n"], d["m"]
        part, pos = np.divmod(np.arange(v), m)
        return [
            ("part-cycle", ((part + 1) % n) * m + pos),
            ("part-swap", np.where(part < 2, 1 - part, part) * m + pos),
            ("inner-cycle[0]", part * m + np.where(part == 0, (pos + 1) % m, pos)),
            ("inner-swap[0]", part * m + np.where((part == 0) & (pos < 2), (1 - pos) % m, pos)),
        ]
    if fam == "paley":
        ctx = field_of_order(d["q"])
        s = ctx.mul(ctx.generator, ctx.generator)
        gens = [("translate[1]", np.array([ctx.add(x, 1) for x in range(v)])),
                (f"scale[{s}]", np.array([ctx.mul(x, s) for x in range(v)]))]
        if ctx.e > 1:
            gens.append(("translate[x]", np.array([ctx.add(x, ctx.p) for x in range(v)])))
            gens.append(("frobenius", np.array([ctx.frobenius(x) for x in range(v)])))
        return gens
    if fam == "petersen":
        subsets = list(itertools.combinations(range(5), 2))
        index = {s: i for i, s in enumerate(subsets)}

        def induced(perm):
            return np.array([index[tuple(sorted(perm[a] for a in s))] for s in subsets])

        return [("cycle(01234)", induced([1, 2, 3, 4, 0])), ("swap(01)", induced([1, 0, 2, 3, 4]))]
    raise ValueError(f"no generators known for {g.name}")


# -- derived data ----------------------------------------------------------------

def triangle_witness(g: SrgInstance, in_complement: bool = False):
    """Lexicographically first mutually adjacent triple, or None."""
    adj = g.complement_adj() if in_complement else g.adj
    a = adj.astype(np.float64)
    common = (a @ a) * a
    hits = np.argwhere(common > 0)
    if len(hits) == 0:
        return None
    x, y = (int(t) for t in hits[0])
    z = int(np.flatnonzero(adj[x] & adj[y])[0])
    return tuple(sorted((x, y, z)))


def is_triangle(g: SrgInstance, triple, in_complement: bool = False) -> bool:
    adj = g.complement_adj() if in_complement else g.adj
    x, y, z = triple
    return len({x, y, z}) == 3 and bool(adj[x, y] and adj[x, z] and adj[y, z])


def intersection_numbers(g: SrgInstance) -> np.ndarray:
    """p[i][j][k] = #{z : (x, z) in R_i, (z, y) in R_j} for any (x, y) in R_k."""
    mats, _ = g.rel_matrices()
    rel = g.relation()
    f = [m.astype(np.float64) for m in mats]
    p = np.zeros((3, 3, 3), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            prod = (f[i] @ f[j]).round().astype(np.int64)
            for k in range(3):
                vals = np.unique(prod[rel == k])
                if len(vals) > 1:
                    raise SrgError(f"p^{k}_{i}{j} not well defined: {vals}")
                p[i, j, k] = vals[0] if len(vals) else 0
    _, k, lam, mu = g.params
    if p[1, 1, 0] != k or p[1, 1, 1] != lam or p[1, 1, 2] != mu:
        raise SrgError("intersection numbers disagree with (k, lam, mu)")
    return p


def rebased(g: SrgInstance, base: int) -> SrgInstance:
    """Same graph with another base vertex; omega1, omega2 chosen as the first available."""
    return SrgInstance(g.name, g.adj, g.params, base=base, coords=g.coords, space=g.space,
                       descriptor=dict(g.descriptor))


# -- export ----------------------------------------------------------------------

def to_graph6(g: SrgInstance) -> bytes:
    import networkx as nx

    graph = nx.Graph()
    graph.add_nodes_from(range(g.v))
    graph.add_edges_from(zip(*np.nonzero(np.triu(g.adj))))
    return nx.to_graph6_bytes(graph, header=False)


def to_dimacs(g: SrgInstance) -> str:
    edges = np.argwhere(np.triu(g.adj))
    lines = [f"c {g.name}", f"p edge {g.v} {len(edges)}"]
    lines += [f"e {a + 1} {b + 1}" for a, b in edges]
    return "\n".join(lines) + "\n"


def export_graph(g: SrgInstance, path, fmt: str = "graph6") -> None:
    if fmt == "graph6":
        data = to_graph6(g)
        with open(path, "wb") as fh:
            fh.write(data)
    elif fmt == "dimacs":
        with open(path, "w") as fh:
            fh.write(to_dimacs(g))
    else:
        raise ValueError(f"unknown graph format {fmt!r}")
