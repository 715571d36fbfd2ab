"""Finite fields GF(p^e) with integer-encoded elements.

An element is the integer whose base-p digits are the coefficients of its
residue polynomial, lowest degree first.  So in GF(4) with modulus x^2+x+1
the element ``x`` is encoded as 2 and ``x + 1`` as 3.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

MAX_ORDER = 1 << 20
TABLE_LIMIT = 1 << 16

FieldElem = int


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomials over GF(p), coefficient lists low degree first ----------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def _monic_polys(p: int, degree: int):
    for code in range(p**degree):
        coeffs = []
        for _ in range(degree):
            coeffs.append(code % p)
            code //= p
        yield coeffs + [1]


def is_irreducible(m: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg(m)//2."""
    deg = len(m) - 1
    if deg <= 0:
        return False
    if deg == 1:
        return True
    for d in range(1, deg // 2 + 1):
        for f in _monic_polys(p, d):
            if not _poly_mod(m, f, p):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> list[int]:
    """Monic irreducible of degree e whose lower coefficients have the
    smallest integer code (base p, constant term as the lowest digit)."""
    if e == 1:
        return [0, 1]
    for m in _monic_polys(p, e):
        if m[0] != 0 and is_irreducible(m, p):
            return m
    raise AssertionError(f"no irreducible polynomial of degree {e} over GF({p})")


class FieldCtx:
    """Arithmetic context for GF(q), q = p**e.  Immutable once built."""

    def __init__(self, p: int, e: int = 1):
        if not is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if e < 1:
            raise ValueError("extension degree must be at least 1")
        if p**e > MAX_ORDER:
            raise ValueError(f"field order {p}^{e} exceeds {MAX_ORDER}")
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = smallest_irreducible(p, e)
        self._exp = None
        self._log = None
        self.generator = self._find_generator()
        if self.q <= TABLE_LIMIT:
            self._build_log_tables()

    def __repr__(self):
        return f"FieldCtx(p={self.p}, e={self.e})"

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.e) == (other.p, other.e)

    def __hash__(self):
        return hash((self.p, self.e))

    # -- encoding --------------------------------------------------------------

    def to_poly(self, a: int) -> list[int]:
        out = []
        for _ in range(self.e):
            out.append(a % self.p)
            a //= self.p
        return out

    def from_poly(self, coeffs) -> int:
        a = 0
        for c in reversed(list(coeffs)[: self.e]):
            a = a * self.p + c % self.p
        return a

    def elements(self) -> range:
        return range(self.q)

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of GF({self.q})")
        return a

    # -- arithmetic ------------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.from_poly([x + y for x, y in zip(self.to_poly(a), self.to_poly(b))])

    def neg(self, a: int) -> int:
        if self.e == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return self.from_poly([-x for x in self.to_poly(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _poly_mul(self, a: int, b: int) -> int:
        pa, pb = self.to_poly(a), self.to_poly(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(pa):
            if x:
                for j, y in enumerate(pb):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        return self.from_poly(_poly_mod(prod, self.modulus, self.p) + [0] * self.e)

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.e == 1:
            return a * b % self.p
        if self._log is not None:
            return int(self._exp[(self._log[a] + self._log[b]) % (self.q - 1)])
        return self._poly_mul(a, b)

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(a), -n)
        if a == 0:
            return 1 if n == 0 else 0
        if self._log is not None:
            return int(self._exp[self._log[a] * n % (self.q - 1)])
        result, base = 1, a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.q)
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        if self._log is not None:
            return int(self._exp[(-self._log[a]) % (self.q - 1)])
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: int, times: int = 1) -> int:
        return self.pow(a, self.p ** (times % self.e))

    def _find_generator(self) -> int:
        if self.q == 2:
            return 1
        n = self.q - 1
        rs = prime_factors(n)
        saved = self._log
        self._log = None
        try:
            for g in range(2 if self.e == 1 else self.p, self.q):
                if all(self.pow(g, n // r) != 1 for r in rs):
                    return g
        finally:
            self._log = saved
        raise AssertionError("multiplicative group has no generator")

    def _build_log_tables(self):
        n = self.q - 1
        exp = np.zeros(2 * n, dtype=np.int64)
        log = np.full(self.q, -1, dtype=np.int64)
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self._poly_mul(x, self.generator) if self.e > 1 else x * self.generator % self.p
        exp[n:] = exp[:n]
        self._exp, self._log = exp, log

    # -- vectorised tables (small fields only) ---------------------------------

    @cached_property
    def add_table(self) -> np.ndarray:
        q = self.q
        if q > 1024:
            raise ValueError("addition table only built for q <= 1024")
        return np.array([[self.add(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)

    @cached_property
    def mul_table(self) -> np.ndarray:
        q = self.q
        if q > 1024:
            raise ValueError("multiplication table only built for q <= 1024")
        return np.array([[self.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int64)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.array([self.neg(a) for a in range(self.q)], dtype=np.int64)

    @cached_property
    def inv_table(self) -> np.ndarray:
        return np.array([0] + [self.inv(a) for a in range(1, self.q)], dtype=np.int64)

    def vadd(self, a, b):
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return np.bitwise_xor(a, b)
        return self.add_table[a, b]

    def vmul(self, a, b):
        if self.e == 1:
            return (a * b) % self.p
        return self.mul_table[a, b]

    def vfrobenius(self, a, times: int = 1):
        table = np.array([self.frobenius(x, times) for x in range(self.q)], dtype=np.int64)
        return table[a]

    def matmul_rows(self, rows: np.ndarray, matrix: np.ndarray) -> np.ndarray:
        """Apply ``matrix`` to each row vector: out[r] = matrix @ rows[r]."""
        rows = np.asarray(rows, dtype=np.int64)
        matrix = np.asarray(matrix, dtype=np.int64)
        if self.e == 1:
            return (rows @ matrix.T) % self.p
        out = np.zeros((rows.shape[0], matrix.shape[0]), dtype=np.int64)
        for j in range(matrix.shape[0]):
            acc = np.zeros(rows.shape[0], dtype=np.int64)
            for i in range(matrix.shape[1]):
                c = int(matrix[j, i])
                if c:
                    acc = self.vadd(acc, self.vmul(rows[:, i], c))
            out[:, j] = acc
        return out

    # -- squares ---------------------------------------------------------------

    def is_square(self, a: int) -> bool:
        if a == 0:
            raise ValueError("square class of zero is undefined")
        if self.p == 2:
            return True
        return self.pow(a, (self.q - 1) // 2) == 1

    def squares(self) -> set[int]:
        return {self.mul(x, x) for x in range(1, self.q)}

    def find_nonsquare(self) -> int:
        if self.p == 2:
            raise ValueError("GF(%d) has no nonsquares" % self.q)
        for a in range(1, self.q):
            if not self.is_square(a):
                return a
        raise AssertionError("unreachable")

    def trace(self, a: int) -> int:
        """Absolute trace to GF(p), returned as an integer mod p."""
        t, x = 0, a
        for _ in range(self.e):
            t = self.add(t, x)
            x = self.frobenius(x)
        return t


def field_make(p: int, e: int = 1) -> FieldCtx:
    return FieldCtx(p, e)


def field_of_order(q: int) -> FieldCtx:
    for p in prime_factors(q)[:1]:
        e, r = 0, q
        while r % p == 0:
            r //= p
            e += 1
        if r == 1:
            return FieldCtx(p, e)
    raise ValueError(f"{q} is not a prime power")


def lemma_tech_solve(ctx: FieldCtx, delta: int, lam: int) -> tuple[int, int]:
    """First (a, c) in lexicographic order with a^2 - delta*c^2 = lam.

    Both ``delta`` and ``lam`` must be nonsquares of an odd-order field.
    """
    if ctx.p == 2:
        raise ValueError("requires odd q")
    for name, x in (("delta", delta), ("lambda", lam)):
        if x == 0 or ctx.is_square(x):
            raise ValueError(f"{name}={x} is not a nonsquare in GF({ctx.q})")
    sq = [ctx.mul(x, x) for x in range(ctx.q)]
    for a in range(ctx.q):
        for c in range(ctx.q):
            if ctx.sub(sq[a], ctx.mul(delta, sq[c])) == lam:
                return a, c
    raise AssertionError("no solution; field arithmetic is broken")


def lemma_tech_map(ctx: FieldCtx, delta: int, a: int, c: int, x: int, y: int) -> tuple[int, int]:
    """(x, y) -> (a x + c delta y, c x + a y); scales x^2 - delta y^2 by a^2 - delta c^2."""
    return (
        ctx.add(ctx.mul(a, x), ctx.mul(ctx.mul(c, delta), y)),
        ctx.add(ctx.mul(c, x), ctx.mul(a, y)),
    )


def binary_form(ctx: FieldCtx, delta: int, x: int, y: int) -> int:
    """x^2 - delta y^2."""
    return ctx.sub(ctx.mul(x, x), ctx.mul(delta, ctx.mul(y, y)))
