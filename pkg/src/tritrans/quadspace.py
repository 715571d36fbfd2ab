"""Quadratic spaces over GF(q) for the two polar constructions.

Two kinds of space are supported:

``qminus5``
    V = GF(q)^6 with Q(x) = x1 x2 + x3 x4 + f(x5, x6), f an irreducible
    binary form.  For odd q, f = x^2 - delta y^2 with delta the least
    nonsquare; for even q, f = x^2 + x y + a y^2 with a the least element of
    absolute trace 1.
``vo``
    V = GF(2)^(2m) with Q(x) = x1 x2 + ... + x_{2m-3} x_{2m-2} + f, where
    f = x y for type +1 and x^2 + x y + y^2 for type -1.

Vectors are tuples (or numpy rows) of integer-encoded field elements.
Maps act by: Frobenius twist first, then the matrix, then the translation.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass

import numpy as np

from .gf import FieldCtx, field_of_order, lemma_tech_solve

MAX_POINTS = 10**6

Vec = tuple


@dataclass(frozen=True)
class LinMap:
    matrix: np.ndarray
    field_twist: int = 0
    translation: tuple | None = None
    kind: str = "isometry"  # isometry | similarity | semilinear | translation
    factor: int = 1
    label: str = ""

    def apply_rows(self, ctx: FieldCtx, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.int64)
        if self.field_twist:
            rows = ctx.vfrobenius(rows, self.field_twist)
        out = ctx.matmul_rows(rows, self.matrix)
        if self.translation is not None:
            out = ctx.vadd(out, np.asarray(self.translation, dtype=np.int64)[None, :])
        return out

    def apply(self, ctx: FieldCtx, x) -> tuple:
        return tuple(int(c) for c in self.apply_rows(ctx, np.asarray([x]))[0])


class QuadSpace:
    """A nondegenerate quadratic space (V, Q) of one of the two kinds."""

    def __init__(self, ctx: FieldCtx, kind: str, m: int = 3, eps: int = -1):
        self.ctx = ctx
        self.kind = kind
        if kind == "qminus5":
            self.dim = 6
            self.eps = -1
            if ctx.p == 2:
                self.delta = None
                self.trace_one = next(a for a in ctx.elements() if ctx.trace(a) == 1)
                # f(x, y) = x^2 + x y + a y^2
                self.f_coeffs = (1, 1, self.trace_one)
            else:
                self.delta = ctx.find_nonsquare()
                self.trace_one = None
                self.f_coeffs = (1, 0, ctx.neg(self.delta))
        elif kind == "vo":
            if ctx.q != 2:
                raise ValueError("VO spaces are defined over GF(2)")
            if m < 2 or eps not in (1, -1):
                raise ValueError(f"invalid VO parameters m={m}, eps={eps}")
            self.dim = 2 * m
            self.eps = eps
            self.delta = None
            self.trace_one = None
            self.f_coeffs = (0, 1, 0) if eps == 1 else (1, 1, 1)
        else:
            raise ValueError(f"unknown space kind {kind!r}")
        self.m = self.dim // 2
        self._gram = self._polar_gram()

    def __repr__(self):
        if self.kind == "vo":
            return f"QuadSpace(vo, m={self.m}, eps={self.eps:+d})"
        return f"QuadSpace(qminus5, q={self.ctx.q})"

    # -- the form ------------------------------------------------------------

    def _polar_gram(self) -> np.ndarray:
        """Gram matrix of B with respect to the standard basis."""
        n, ctx = self.dim, self.ctx
        g = np.zeros((n, n), dtype=np.int64)
        for i in range(0, n - 2, 2):
            g[i, i + 1] = g[i + 1, i] = 1
        a, b, c = self.f_coeffs
        g[n - 2, n - 2] = ctx.add(a, a)
        g[n - 1, n - 1] = ctx.add(c, c)
        g[n - 2, n - 1] = g[n - 1, n - 2] = b
        return g

    def eval_f(self, x: int, y: int) -> int:
        ctx = self.ctx
        a, b, c = self.f_coeffs
        return ctx.add(ctx.add(ctx.mul(a, ctx.mul(x, x)), ctx.mul(b, ctx.mul(x, y))),
                       ctx.mul(c, ctx.mul(y, y)))

    def _check(self, x):
        if len(x) != self.dim:
            raise ValueError(f"vector of length {len(x)} in a space of dimension {self.dim}")

    def eval_Q(self, x) -> int:
        self._check(x)
        ctx = self.ctx
        s = 0
        for i in range(0, self.dim - 2, 2):
            s = ctx.add(s, ctx.mul(int(x[i]), int(x[i + 1])))
        return ctx.add(s, self.eval_f(int(x[-2]), int(x[-1])))

    def eval_B(self, x, y) -> int:
        self._check(x)
        self._check(y)
        ctx = self.ctx
        s = 0
        for i in range(self.dim):
            for j in range(self.dim):
                g = int(self._gram[i, j])
                if g:
                    s = ctx.add(s, ctx.mul(g, ctx.mul(int(x[i]), int(y[j]))))
        return s

    def Q_rows(self, rows: np.ndarray) -> np.ndarray:
        ctx = self.ctx
        rows = np.asarray(rows, dtype=np.int64)
        s = np.zeros(rows.shape[0], dtype=np.int64)
        for i in range(0, self.dim - 2, 2):
            s = ctx.vadd(s, ctx.vmul(rows[:, i], rows[:, i + 1]))
        a, b, c = self.f_coeffs
        x, y = rows[:, -2], rows[:, -1]
        for coeff, term in ((a, ctx.vmul(x, x)), (b, ctx.vmul(x, y)), (c, ctx.vmul(y, y))):
            if coeff:
                s = ctx.vadd(s, ctx.vmul(term, coeff))
        return s

    def B_matrix(self, rows_x: np.ndarray, rows_y: np.ndarray) -> np.ndarray:
        """B(x_r, y_s) for every pair of rows, as an |X| x |Y| array."""
        ctx = self.ctx
        gy = ctx.matmul_rows(rows_y, self._gram)  # row s holds G y_s
        rows_x = np.asarray(rows_x, dtype=np.int64)
        if ctx.e == 1:
            return (rows_x @ gy.T) % ctx.p
        out = np.zeros((rows_x.shape[0], gy.shape[0]), dtype=np.int64)
        for i in range(self.dim):
            out = ctx.vadd(out, ctx.mul_table[rows_x[:, i][:, None], gy[:, i][None, :]])
        return out

    # -- enumeration ---------------------------------------------------------

    def all_vectors(self) -> np.ndarray:
        """Every vector of V in lexicographic order (x1 most significant)."""
        q, n = self.ctx.q, self.dim
        if q**n > 16 * MAX_POINTS:
            raise ValueError(f"space of size {q}^{n} is beyond desk scale")
        codes = np.arange(q**n, dtype=np.int64)
        out = np.empty((q**n, n), dtype=np.int64)
        for i in range(n - 1, -1, -1):
            out[:, i] = codes % q
            codes //= q
        return out

    def normalize_rows(self, rows: np.ndarray) -> np.ndarray:
        """Scale each nonzero row so its first nonzero coordinate is 1."""
        ctx = self.ctx
        rows = np.asarray(rows, dtype=np.int64)
        nz = rows != 0
        first = np.argmax(nz, axis=1)
        lead = rows[np.arange(rows.shape[0]), first]
        if np.any(lead == 0):
            raise ValueError("cannot normalise the zero vector")
        return ctx.vmul(rows, ctx.inv_table[lead][:, None])

    def singular_vectors(self) -> np.ndarray:
        vecs = self.all_vectors()[1:]
        return vecs[self.Q_rows(vecs) == 0]

    def enumerate_points(self) -> np.ndarray:
        """Vertex coordinates: singular projective points (qminus5) or all of V (vo).

        Rows are sorted lexicographically and duplicate-free.
        """
        if self.kind == "vo":
            return self.all_vectors()
        sing = self.singular_vectors()
        pts = sing[np.all(self.normalize_rows(sing) == sing, axis=1)]
        if len(pts) > MAX_POINTS:
            raise ValueError("point set beyond desk scale")
        return pts

    def encode(self, rows: np.ndarray) -> np.ndarray:
        q = self.ctx.q
        rows = np.asarray(rows, dtype=np.int64)
        code = np.zeros(rows.shape[0], dtype=np.int64)
        for i in range(self.dim):
            code = code * q + rows[:, i]
        return code

    def perp(self, x):
        """Membership predicate for x^perp; the zero vector has no perp here."""
        if not any(x):
            raise ValueError("perp of the zero vector")
        x = tuple(int(c) for c in x)
        return lambda y: self.eval_B(x, y) == 0

    def point_csv(self, path, points=None):
        points = self.enumerate_points() if points is None else points
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index"] + [f"x{i + 1}" for i in range(self.dim)])
            for idx, row in enumerate(points):
                w.writerow([idx] + [int(c) for c in row])

    # -- map verification ----------------------------------------------------

    def check_map(self, lm: LinMap, exhaustive_limit: int = 1 << 16, samples: int = 4096,
                  seed: int = 0) -> bool:
        """Q(lm(x)) == factor * Q(x)^(p^twist) on every vector (sampled above the limit)."""
        ctx = self.ctx
        if ctx.q**self.dim <= exhaustive_limit:
            rows = self.all_vectors()
        else:
            rng = np.random.default_rng(seed)
            rows = rng.integers(0, ctx.q, size=(samples, self.dim))
        lhs = self.Q_rows(lm.apply_rows(ctx, rows))
        rhs = self.Q_rows(rows)
        if lm.field_twist:
            rhs = ctx.vfrobenius(rhs, lm.field_twist)
        rhs = ctx.vmul(rhs, lm.factor)
        return bool(np.all(lhs == rhs))

    def _verified(self, lm: LinMap) -> LinMap:
        if not self._invertible(lm.matrix):
            raise ValueError(f"map {lm.label!r} is singular")
        if not self.check_map(lm):
            raise ValueError(f"map {lm.label!r} does not scale Q as claimed")
        return lm

    def _invertible(self, matrix: np.ndarray) -> bool:
        ctx = self.ctx
        a = [[int(v) for v in row] for row in matrix]
        n = len(a)
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col]), None)
            if piv is None:
                return False
            a[col], a[piv] = a[piv], a[col]
            inv = ctx.inv(a[col][col])
            for r in range(col + 1, n):
                if a[r][col]:
                    c = ctx.mul(a[r][col], inv)
                    a[r] = [ctx.sub(x, ctx.mul(c, y)) for x, y in zip(a[r], a[col])]
        return True

    def basis(self, i: int) -> tuple:
        """Standard basis vector e_i, 1-based as in the coordinates x1..xn."""
        v = [0] * self.dim
        v[i - 1] = 1
        return tuple(v)

    # -- explicit witness maps -----------------------------------------------

    def witness_phi_lambda(self, lam: int) -> LinMap:
        """(x1, x2, ...) -> (lam x1, lam^-1 x2, x3, ...)."""
        self._require("qminus5")
        ctx = self.ctx
        m = np.eye(self.dim, dtype=np.int64)
        m[0, 0] = lam
        m[1, 1] = ctx.inv(lam)
        return self._verified(LinMap(m, label=f"phi_lambda[{lam}]"))

    def witness_theta_lambda(self, lam: int, u) -> LinMap:
        """x1 += lam/u4 * x4 and x3 -= lam/u4 * x2; an isometry with u -> lam e1 + u."""
        self._require("qminus5")
        ctx = self.ctx
        if lam == 0:
            raise ValueError("lambda must be nonzero")
        if u[3] == 0:
            raise ValueError("u4 must be nonzero")
        c = ctx.mul(lam, ctx.inv(int(u[3])))
        m = np.eye(self.dim, dtype=np.int64)
        m[0, 3] = c
        m[2, 1] = ctx.neg(c)
        return self._verified(LinMap(m, label=f"theta_lambda[{lam};u4={int(u[3])}]"))

    def similarity_data(self) -> tuple[int, int, int]:
        """(alpha, a, c) with alpha the canonical nonsquare and a^2 - delta c^2 = alpha."""
        self._require("qminus5")
        if self.ctx.p == 2:
            raise ValueError("the square-class similarity needs odd q")
        alpha = self.delta
        a, c = lemma_tech_solve(self.ctx, self.delta, alpha)
        return alpha, a, c

    def witness_rho_similarity(self) -> LinMap:
        """(alpha x1, x2, alpha x3, x4, a x5 + delta c x6, c x5 + a x6); scales Q by alpha."""
        ctx = self.ctx
        alpha, a, c = self.similarity_data()
        m = np.zeros((6, 6), dtype=np.int64)
        m[0, 0] = alpha
        m[1, 1] = 1
        m[2, 2] = alpha
        m[3, 3] = 1
        m[4, 4] = a
        m[4, 5] = ctx.mul(self.delta, c)
        m[5, 4] = c
        m[5, 5] = a
        lm = LinMap(m, kind="similarity", factor=alpha, label=f"rho[alpha={alpha}]")
        return self._verified(lm)

    def witness_vo_maps(self) -> tuple[LinMap, LinMap, LinMap]:
        """The three isometries theta, rho, phi fixing 0 and e1 + e2.

        They need (x3, x4) to be a hyperbolic pair, i.e. m >= 3 or type +1.
        """
        self._require("vo")
        n = self.dim
        if self.m == 2 and self.eps == -1:
            raise ValueError("theta and phi are not isometries of VO^-_4(2)")
        theta = np.eye(n, dtype=np.int64)
        theta[0, 3] = theta[1, 3] = 1
        theta[2, :4] = 1
        rho = np.eye(n, dtype=np.int64)
        rho[:2, :2] = [[0, 1], [1, 0]]
        phi = np.eye(n, dtype=np.int64)
        phi[0, 2] = phi[1, 2] = 1
        phi[3, :4] = 1
        return tuple(self._verified(LinMap(mat, label=name))
                     for mat, name in ((theta, "theta"), (rho, "rho"), (phi, "phi")))

    def _require(self, kind: str):
        if self.kind != kind:
            raise ValueError(f"operation needs a {kind} space, not {self.kind}")

    # -- generator sets -------------------------------------------------------

    def reflection(self, v) -> LinMap:
        """x -> x - (B(x, v) / Q(v)) v; an orthogonal transvection in characteristic 2."""
        ctx = self.ctx
        qv = self.eval_Q(v)
        if qv == 0:
            raise ValueError("reflection in a singular vector")
        inv = ctx.inv(qv)
        # B(x, v) = sum_j x_j (G v)_j
        gv = [int(c) for c in ctx.matmul_rows(np.asarray([v]), self._gram)[0]]
        m = np.eye(self.dim, dtype=np.int64)
        for i in range(self.dim):
            for j in range(self.dim):
                term = ctx.mul(ctx.mul(int(v[i]), inv), gv[j])
                m[i, j] = ctx.sub(int(m[i, j]), term)
        return LinMap(m, label="reflection[" + "".join(str(int(c)) for c in v) + "]")

    def pair_swaps(self) -> list[LinMap]:
        """Permutations of the hyperbolic coordinate pairs; isometries for either kind."""
        pairs = (self.dim - 2) // 2 + (1 if self.f_coeffs == (0, 1, 0) else 0)
        out = []
        for i, j in itertools.combinations(range(pairs), 2):
            perm = list(range(self.dim))
            perm[2 * i], perm[2 * j] = perm[2 * j], perm[2 * i]
            perm[2 * i + 1], perm[2 * j + 1] = perm[2 * j + 1], perm[2 * i + 1]
            m = np.zeros((self.dim, self.dim), dtype=np.int64)
            for r, c in enumerate(perm):
                m[r, c] = 1
            out.append(LinMap(m, label=f"pairswap[{i + 1},{j + 1}]"))
        return out

    def seed_vectors(self, count: int = 12) -> list[tuple]:
        """Nonsingular basis vectors, then nonsingular sums e_i + e_j, in order."""
        out = []
        for i in range(1, self.dim + 1):
            v = self.basis(i)
            if self.eval_Q(v):
                out.append(v)
        for i, j in itertools.combinations(range(1, self.dim + 1), 2):
            v = tuple(self.ctx.add(a, b) for a, b in zip(self.basis(i), self.basis(j)))
            if self.eval_Q(v):
                out.append(v)
        return out[:count]

    def random_nonsingular(self, rng: np.random.Generator, count: int) -> list[tuple]:
        out = []
        while len(out) < count:
            v = tuple(int(c) for c in rng.integers(0, self.ctx.q, size=self.dim))
            if self.eval_Q(v):
                out.append(v)
        return out

    def frobenius_map(self) -> LinMap:
        """Coordinatewise p-th power followed by a fix-up on the binary block.

        The Frobenius twist sends f to f^sigma; the 2x2 block (found by search)
        maps f^sigma back to f, so the composite preserves the singular points.
        """
        ctx = self.ctx
        if ctx.e == 1:
            raise ValueError("Frobenius is trivial over a prime field")
        a, b, c = self.f_coeffs
        fs = tuple(ctx.frobenius(t) for t in (a, b, c))
        target = [[None] * ctx.q for _ in range(ctx.q)]
        for x in range(ctx.q):
            for y in range(ctx.q):
                target[x][y] = ctx.add(ctx.add(ctx.mul(fs[0], ctx.mul(x, x)),
                                               ctx.mul(fs[1], ctx.mul(x, y))),
                                       ctx.mul(fs[2], ctx.mul(y, y)))
        block = None
        for m11, m12, m21, m22 in itertools.product(range(ctx.q), repeat=4):
            if ctx.sub(ctx.mul(m11, m22), ctx.mul(m12, m21)) == 0:
                continue
            if all(self.eval_f(ctx.add(ctx.mul(m11, x), ctx.mul(m12, y)),
                               ctx.add(ctx.mul(m21, x), ctx.mul(m22, y))) == target[x][y]
                   for x in range(ctx.q) for y in range(ctx.q)):
                block = (m11, m12, m21, m22)
                break
        if block is None:
            raise AssertionError("no linear fix-up for the Frobenius twist")
        m = np.eye(self.dim, dtype=np.int64)
        m[-2, -2], m[-2, -1], m[-1, -2], m[-1, -1] = block
        return self._verified(LinMap(m, field_twist=1, kind="semilinear", label="frobenius"))

    def translations(self) -> list[LinMap]:
        self._require("vo")
        eye = np.eye(self.dim, dtype=np.int64)
        return [LinMap(eye, translation=self.basis(i), kind="translation", label=f"translate[e{i}]")
                for i in range(1, self.dim + 1)]

    def generator_set(self, kind: str, extra_random: int = 0, seed: int = 0) -> list[LinMap]:
        """Generators of one kind: orthogonal, similarity, frobenius or translations."""
        if kind == "orthogonal":
            vecs = self.seed_vectors()
            if extra_random:
                vecs += self.random_nonsingular(np.random.default_rng(seed), extra_random)
            maps = [self.reflection(v) for v in vecs] + self.pair_swaps()
            return [self._verified(lm) for lm in maps]
        if kind == "similarity":
            return [self.witness_rho_similarity()] if self.kind == "qminus5" and self.ctx.p != 2 else []
        if kind == "frobenius":
            return [self.frobenius_map()] if self.ctx.e > 1 else []
        if kind == "translations":
            return self.translations()
        raise ValueError(f"unknown generator kind {kind!r}")


def qminus5_space(q: int) -> QuadSpace:
    return QuadSpace(field_of_order(q), "qminus5")


def vo_space(m: int, eps: int) -> QuadSpace:
    return QuadSpace(field_of_order(2), "vo", m=m, eps=eps)
