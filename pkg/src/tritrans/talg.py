"""Exact dimensions of T0 and of the Terwilliger algebra T.

All generators are 0/1 integer matrices, so rational arithmetic suffices:
the dimension over Q of the algebra they generate is the dimension over C.
Spans are kept as fraction-free integer echelon rows (each row primitive,
with a distinct pivot); int64 is used while entries are provably small and
Python integers take over when a bound could overflow.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .srg import SrgInstance, triangle_witness

INT64_SAFE = 1 << 62
CLOSURE_MAX_V = 130


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.flat)
    return int(np.abs(a).max())


def _shrink(a: np.ndarray) -> np.ndarray:
    if a.dtype == object and _maxabs(a) < INT64_SAFE:
        return a.astype(np.int64)
    return a


def _primitive(a: np.ndarray) -> np.ndarray:
    """Divide out the content and make the first nonzero entry positive."""
    nz = np.flatnonzero(a)
    if len(nz) == 0:
        return a
    if a.dtype == object:
        g = reduce(math.gcd, (int(a[i]) for i in nz))
    else:
        g = int(np.gcd.reduce(a[nz]))
    if a[nz[0]] < 0:
        g = -g
    if g != 1:
        a = a // g
    return _shrink(a)


def _combine(x: np.ndarray, cx: int, y: np.ndarray, cy: int) -> np.ndarray:
    """cx * x - cy * y without overflow."""
    if (abs(cx) * _maxabs(x) + abs(cy) * _maxabs(y) < INT64_SAFE
            and x.dtype != object and y.dtype != object):
        return cx * x - cy * y
    return x.astype(object) * cx - y.astype(object) * cy


def _matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[1]
    if a.dtype != object and b.dtype != object and _maxabs(a) * _maxabs(b) * n < INT64_SAFE:
        return a @ b
    return _shrink(a.astype(object) @ b.astype(object))


@dataclass
class ExactMat:
    """Rational matrix num / den with a shared positive denominator."""

    num: np.ndarray
    den: int = 1

    def __post_init__(self):
        if self.den < 1:
            raise ValueError("denominator must be positive")
        flat = self.num.ravel()
        nz = np.flatnonzero(flat)
        g = self.den
        for i in nz:
            g = math.gcd(g, int(flat[i]))
            if g == 1:
                break
        if g > 1:
            self.num = _shrink(self.num // g)
            self.den //= g

    @property
    def shape(self):
        return self.num.shape

    def __matmul__(self, other: "ExactMat") -> "ExactMat":
        return ExactMat(_matmul(self.num, other.num), self.den * other.den)

    def flat(self) -> np.ndarray:
        """Flattened vector scaled to integers (scaling does not change spans)."""
        return self.num.ravel()


class MatSpan:
    """Span of rational vectors, stored as primitive integer echelon rows."""

    def __init__(self, length: int):
        self.length = length
        self.rows: list[tuple[int, np.ndarray]] = []

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, vec) -> np.ndarray:
        vec = np.asarray(vec)
        if vec.shape != (self.length,):
            raise ValueError(f"vector of length {vec.size}, span of length {self.length}")
        vec = _primitive(vec.astype(np.int64) if vec.dtype != object else vec.copy())
        for pivot, row in self.rows:
            c = vec[pivot]
            if c:
                vec = _primitive(_combine(vec, int(row[pivot]), row, int(c)))
        return vec

    def contains(self, vec) -> bool:
        return not np.any(self.reduce(vec))

    def add(self, vec) -> np.ndarray | None:
        """Insert vec; return its reduced form if it enlarged the span, else None."""
        r = self.reduce(vec)
        nz = np.flatnonzero(r)
        if len(nz) == 0:
            return None
        self.rows.append((int(nz[0]), r))
        return r

    def basis(self) -> list[np.ndarray]:
        return [row for _, row in self.rows]


def _as_flat(m) -> np.ndarray:
    if isinstance(m, ExactMat):
        return m.flat()
    return np.asarray(m).ravel()


def rational_rank(mats) -> int:
    """Rank over Q of the matrices viewed as flattened vectors."""
    mats = list(mats)
    if not mats:
        return 0
    shape = np.asarray(mats[0].num if isinstance(mats[0], ExactMat) else mats[0]).shape
    span = MatSpan(int(np.prod(shape)))
    for m in mats:
        s = m.shape if isinstance(m, ExactMat) else np.asarray(m).shape
        if s != shape:
            raise ValueError(f"shape mismatch: {s} vs {shape}")
        span.add(_as_flat(m))
    return span.dim


# -- T0 -------------------------------------------------------------------------

@dataclass
class T0Result:
    dim: int
    nonzero: list[tuple[int, int, int]]
    criterion: int | None
    graph_triangle: tuple | None
    complement_triangle: tuple | None

    def block_counts(self) -> list[list[int]]:
        out = [[0] * 3 for _ in range(3)]
        for i, _, k in self.nonzero:
            out[i][k] += 1
        return out


def t0_products(g: SrgInstance) -> dict[tuple[int, int, int], np.ndarray]:
    """E_i A_j E_k for all 27 index triples (int64 matrices)."""
    mats, es = g.rel_matrices()
    diag = [np.diag(e).astype(bool) for e in es]
    out = {}
    for i in range(3):
        for j in range(3):
            for k in range(3):
                m = np.zeros_like(mats[j])
                m[np.ix_(diag[i], diag[k])] = mats[j][np.ix_(diag[i], diag[k])]
                out[i, j, k] = m
    return out


def triangle_criterion(g: SrgInstance) -> int | None:
    """14 or 15 from the triangle test, or None when it does not apply."""
    if not g.primitive:
        return None
    tri = triangle_witness(g) is not None
    cotri = triangle_witness(g, in_complement=True) is not None
    if tri and cotri:
        return 15
    if tri or cotri:
        return 14
    return None


def dim_T0(g: SrgInstance) -> T0Result:
    """Count the nonzero products E_i A_j E_k; they have disjoint supports."""
    prods = t0_products(g)
    nonzero = [key for key, m in prods.items() if m.any()]
    cover = sum(prods[key] for key in nonzero)
    if cover.max() > 1:
        raise AssertionError("T0 products overlap; the relations do not partition the square")
    crit = triangle_criterion(g)
    if crit is not None and crit != len(nonzero):
        raise AssertionError(f"{g.name}: dim T0 = {len(nonzero)} but triangle criterion gives {crit}")
    return T0Result(len(nonzero), nonzero, crit, triangle_witness(g), triangle_witness(g, True))


# -- closure -----------------------------------------------------------------------

class ClosureError(RuntimeError):
    pass


def dim_T_closure(g: SrgInstance, max_dim: int = 64, seed: int | None = None,
                  max_v: int = CLOSURE_MAX_V, return_span: bool = False):
    """Dimension of the algebra generated by A0, A1, A2, E0, E1, E2, computed exactly.

    ``seed`` shuffles the order in which generators are introduced; the
    result must not depend on it.
    """
    v = g.v
    if v > max_v:
        raise ValueError(f"v={v} exceeds the exact closure bound {max_v}")
    mats, es = g.rel_matrices()
    seeds = mats + es
    if seed is not None:
        random.Random(seed).shuffle(seeds)
    span = MatSpan(v * v)
    done: list[np.ndarray] = []
    queue: list[np.ndarray] = []
    for m in seeds:
        r = span.add(m.ravel())
        if r is not None:
            queue.append(r.reshape(v, v))
    while queue:
        new = queue.pop(0)
        for other in done + [new]:
            for prod in (_matmul(new, other), _matmul(other, new)):
                r = span.add(prod.ravel())
                if r is not None:
                    if span.dim > max_dim:
                        raise ClosureError(f"dimension exceeded {max_dim}")
                    queue.append(r.reshape(v, v))
        done.append(new)
    return (span.dim, span) if return_span else span.dim


def export_basis(span: MatSpan, v: int, path) -> None:
    """Write basis matrices as 'matrix row col numerator denominator' lines."""
    with open(path, "w") as fh:
        fh.write("# matrix row col numerator denominator\n")
        for idx, vec in enumerate(span.basis()):
            for flat in np.flatnonzero(vec):
                r, c = divmod(int(flat), v)
                fh.write(f"{idx} {r} {c} {int(vec[flat])} 1\n")


# -- triple regularity -----------------------------------------------------------------

@dataclass
class TripleRegularity:
    regular: bool
    counterexample: dict | None = None


def triple_regularity_check(g: SrgInstance, max_v: int = 400, sample: int | None = None,
                            seed: int = 0) -> TripleRegularity:
    """Do the 27 triple-intersection counts depend only on the pairwise relations?

    Exhaustive over all (x, y, z) for v <= max_v; otherwise, or when
    ``sample`` is given, only that many first vertices x are examined.
    """
    v = g.v
    rel = g.relation().astype(np.int64)
    ind = [(rel == c) for c in range(3)]
    a1 = ind[1].astype(np.float64)
    xs = list(range(v))
    if sample is not None or v > max_v:
        rng = random.Random(seed)
        xs = sorted(rng.sample(xs, min(v, sample or 32)))
    refs: dict[int, np.ndarray] = {}
    for x in xs:
        # m[a, b, y, w] = [w in D_a(x)] [w in D_b(y)]
        m = np.empty((3, 3, v, v), dtype=np.float64)
        for a in range(3):
            for b in range(3):
                m[a, b] = ind[b] * ind[a][x][None, :]
        flat = m.reshape(9 * v, v)
        c0 = flat
        c1 = flat @ a1
        tot = flat.sum(axis=1, keepdims=True)
        c2 = tot - c0 - c1
        counts = np.stack([c0, c1, c2], axis=-1).reshape(3, 3, v, v, 3)
        counts = np.rint(counts).astype(np.int64).transpose(2, 3, 0, 1, 4).reshape(v, v, 27)
        key = 9 * rel[x][:, None] + 3 * rel[x][None, :] + rel
        for k in np.unique(key):
            sel = counts[key == k]
            ref = refs.setdefault(int(k), sel[0])
            bad = np.flatnonzero(np.any(sel != ref, axis=1))
            if len(bad):
                ys, zs = np.nonzero(key == k)
                y, z = int(ys[bad[0]]), int(zs[bad[0]])
                return TripleRegularity(False, {
                    "triple": [x, y, z],
                    "relations": [int(k) // 9, int(k) // 3 % 3, int(k) % 3],
                    "counts": counts[y, z].tolist(),
                    "reference": ref.tolist(),
                })
    return TripleRegularity(True)


def export_t0(g: SrgInstance, path) -> None:
    """Write the nonzero products E_i A_j E_k as 'i j k row col' lines (all entries are 1)."""
    with open(path, "w") as fh:
        fh.write("# i j k row col\n")
        for (i, j, k), m in t0_products(g).items():
            for r, c in np.argwhere(m):
                fh.write(f"{i} {j} {k} {r} {c}\n")
