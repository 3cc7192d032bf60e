"""Exact linear algebra over the integers localized at a prime p.

All matrices are ``flint.fmpz_mat`` and all arithmetic is exact.  A matrix is
"p-local invertible" when its determinant is not divisible by p; elements of
the localization are represented by fractions whose denominators are prime
to p.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd

import flint

from . import _matrix as mx
from .exceptions import InputError, NoSolution

fmpz_mat = flint.fmpz_mat


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class PrecisionContext:
    """The prime ``p`` and the working exponent ``cap``.

    ``cap`` only bounds the truncated p-adic iterations (idempotent lifting);
    linear algebra never truncates.
    """

    p: int
    cap: int = 64

    def __post_init__(self):
        if not is_prime(int(self.p)):
            raise InputError(f"p = {self.p} is not prime")
        if int(self.cap) < 1:
            raise InputError(f"cap must be positive, got {self.cap}")

    @property
    def modulus(self) -> int:
        return self.p ** self.cap

    def with_cap(self, cap: int) -> "PrecisionContext":
        return replace(self, cap=cap)


def valuation(x: int, p: int) -> int | None:
    """p-adic valuation of an integer; ``None`` for zero."""
    x = int(x)
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def fraction_valuation(x: Fraction, p: int) -> int | None:
    if x == 0:
        return None
    return valuation(x.numerator, p) - valuation(x.denominator, p)


def residue(x, modulus: int) -> int:
    """Image of a p-local number (int or Fraction) in Z/modulus."""
    if isinstance(x, Fraction):
        return x.numerator * pow(x.denominator, -1, modulus) % modulus
    return int(x) % modulus


# --------------------------------------------------------------------------
# Smith form over the localization

@dataclass(frozen=True)
class LocalSmithForm:
    """``U * A * V == D`` with ``U``, ``V`` unimodular integer matrices.

    ``D`` is diagonal; its nonzero entries have p-adic valuations
    ``elementary_exponents`` in nondecreasing order.  Their p-unit parts are
    kept (integer ``U``, ``V`` cannot absorb them), so ``D[i, i]`` equals
    ``p**a_i`` only up to a unit of the localization.
    """

    U: fmpz_mat
    V: fmpz_mat
    D: fmpz_mat
    elementary_exponents: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.elementary_exponents)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def local_smith(A, ctx: PrecisionContext) -> LocalSmithForm:
    """Diagonalize ``A`` by unimodular row and column operations.

    Pivot: the entry of minimal p-valuation in the remaining block, ties
    broken in row-major order.
    """
    p = ctx.p
    A = mx.as_mat(A)
    m, n = A.nrows(), A.ncols()
    a = mx.to_lists(A)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    exps: list[int] = []

    def row_combine(s, i, c11, c12, c21, c22):
        rs, ri = a[s], a[i]
        a[s] = [c11 * x + c12 * y for x, y in zip(rs, ri)]
        a[i] = [c21 * x + c22 * y for x, y in zip(rs, ri)]
        us, ui = U[s], U[i]
        U[s] = [c11 * x + c12 * y for x, y in zip(us, ui)]
        U[i] = [c21 * x + c22 * y for x, y in zip(us, ui)]

    def col_combine(s, j, c11, c12, c21, c22):
        # new col_s = c11*col_s + c12*col_j ; new col_j = c21*col_s + c22*col_j
        for row in a:
            x, y = row[s], row[j]
            row[s], row[j] = c11 * x + c12 * y, c21 * x + c22 * y
        for row in V:
            x, y = row[s], row[j]
            row[s], row[j] = c11 * x + c12 * y, c21 * x + c22 * y

    for s in range(min(m, n)):
        best = None
        for i in range(s, m):
            row = a[i]
            for j in range(s, n):
                if row[j]:
                    v = valuation(row[j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, pi, pj = best
        if pi != s:
            a[s], a[pi] = a[pi], a[s]
            U[s], U[pi] = U[pi], U[s]
        if pj != s:
            for row in a:
                row[s], row[pj] = row[pj], row[s]
            for row in V:
                row[s], row[pj] = row[pj], row[s]
        while True:
            for i in range(s + 1, m):
                y = a[i][s]
                if not y:
                    continue
                x = a[s][s]
                if y % x == 0:
                    row_combine(s, i, 1, 0, -(y // x), 1)
                else:
                    g, c, d = _xgcd(x, y)
                    row_combine(s, i, c, d, -(y // g), x // g)
            for j in range(s + 1, n):
                y = a[s][j]
                if not y:
                    continue
                x = a[s][s]
                if y % x == 0:
                    col_combine(s, j, 1, 0, -(y // x), 1)
                else:
                    g, c, d = _xgcd(x, y)
                    col_combine(s, j, c, d, -(y // g), x // g)
            if all(a[i][s] == 0 for i in range(s + 1, m)):
                break
        if a[s][s] < 0:
            a[s] = [-x for x in a[s]]
            U[s] = [-x for x in U[s]]
        exps.append(valuation(a[s][s], p))

    return LocalSmithForm(
        U=mx.as_mat(U) if m else fmpz_mat(0, 0),
        V=mx.as_mat(V) if n else fmpz_mat(0, 0),
        D=mx.as_mat(a) if m and n else fmpz_mat(m, n),
        elementary_exponents=tuple(exps),
    )


def solve_local(A, b, ctx: PrecisionContext) -> tuple[Fraction, ...]:
    """Exact solution of ``A x = b`` with p-integral entries.

    Entries are Fractions with denominators prime to p.  Raises
    ``NoSolution`` when ``b`` is outside the p-local column span.
    """
    A = mx.as_mat(A)
    b = [int(x) for x in b]
    if len(b) != A.nrows():
        raise InputError("dimension mismatch in solve_local")
    sf = local_smith(A, ctx)
    U = mx.to_lists(sf.U)
    c = [sum(u * x for u, x in zip(row, b)) for row in U]
    D = mx.to_lists(sf.D)
    r = sf.rank
    y = [Fraction(0)] * A.ncols()
    for i in range(r):
        if c[i] and (valuation(c[i], ctx.p) < sf.elementary_exponents[i]):
            raise NoSolution(f"right-hand side not p-integrally reachable (row {i})")
        y[i] = Fraction(c[i], D[i][i])
    if any(c[i] for i in range(r, len(c))):
        raise NoSolution("right-hand side outside the rational column span")
    V = mx.to_lists(sf.V)
    return tuple(sum((V[i][k] * y[k] for k in range(len(y))), Fraction(0)) for i in range(A.ncols()))


# --------------------------------------------------------------------------
# kernels and saturation

def _primitive_columns(B: fmpz_mat) -> fmpz_mat:
    cols = mx.columns(B)
    out = []
    for c in cols:
        g = 0
        for x in c:
            g = gcd(g, x)
        out.append([x // g for x in c] if g > 1 else c)
    return mx.from_columns(out, B.nrows())


def saturate_at(B: fmpz_mat, q: int) -> fmpz_mat:
    """Saturate the column lattice of ``B`` (full column rank) at the prime q."""
    n, d = B.nrows(), B.ncols()
    if d == 0:
        return B
    while True:
        Bq = mx.mod_p(B, q)
        if Bq.rank() == d:
            return B
        K, nul = Bq.nullspace()
        # rows of this matrix: a basis of the mod-q relations, in echelon form
        rel = flint.nmod_mat([[int(K[i, j]) for i in range(d)] for j in range(nul)], q).rref()[0]
        cols = mx.columns(B)
        B_rows = B
        new_cols = list(cols)
        for t in range(nul):
            c = [int(x) for x in rel.tolist()[t]]
            j = next(k for k, x in enumerate(c) if x)
            inv = pow(c[j], -1, q)
            c = [(x * inv) % q for x in c]
            cvec = fmpz_mat([[x] for x in c])
            v = B_rows * cvec
            vals = [int(x) for x in v.entries()]
            if any(x % q for x in vals):
                raise AssertionError("saturation step produced a non-divisible vector")
            new_cols[j] = [x // q for x in vals]
        B = mx.from_columns(new_cols, n)


def _lll_columns(B: fmpz_mat) -> fmpz_mat:
    if B.ncols() <= 1 or B.nrows() == 0:
        return B
    return B.transpose().lll().transpose()


def kernel_local(A, ctx: PrecisionContext) -> fmpz_mat:
    """Basis (as columns) of the saturated kernel ``{x : A x = 0}``.

    The basis spans the kernel over the p-local integers; every column is an
    exact integer kernel vector.
    """
    A = mx.as_mat(A)
    n = A.ncols()
    if n == 0:
        return fmpz_mat(0, 0)
    if A.nrows() == 0:
        return mx.identity(n)
    K, nul = A.nullspace()
    if nul == 0:
        return fmpz_mat(n, 0)
    B = _primitive_columns(mx.select_columns(K, range(nul)))
    B = saturate_at(B, ctx.p)
    return _lll_columns(B)


def saturate(S, n: int, ctx: PrecisionContext) -> fmpz_mat:
    """Basis of ``{v : p^j v in span(S) for some j}`` inside Z^n.

    Computed as the kernel of the annihilator of ``S``, which is saturated by
    construction.
    """
    S = mx.as_mat(S) if not isinstance(S, fmpz_mat) else S
    if S.ncols() == 0 or S.nrows() == 0 or mx.rank_q(S) == 0:
        return fmpz_mat(n, 0)
    ann = kernel_local(S.transpose(), ctx)
    if ann.ncols() == 0:
        return mx.identity(n)
    return kernel_local(ann.transpose(), ctx)


def is_saturated(B: fmpz_mat, p: int) -> bool:
    return B.ncols() == 0 or mx.rank_mod(B, p) == B.ncols()


def coordinates(B: fmpz_mat, X: fmpz_mat, p: int) -> flint.fmpq_mat:
    """Exact coordinates ``C`` with ``B C == X``.

    ``B`` must have full column rank modulo p; raises ``NoSolution`` when a
    column of ``X`` is outside the span of ``B``.
    """
    d = B.ncols()
    if d == 0:
        if not X.is_zero() if X.nrows() and X.ncols() else False:
            raise NoSolution("nonzero vector in the zero lattice")
        return flint.fmpq_mat(0, X.ncols())
    rows = mx.pivot_columns_mod(B.transpose(), p)
    if len(rows) != d:
        raise InputError("basis is not independent modulo p")
    Br = flint.fmpq_mat(mx.select_rows(B, rows))
    Xr = flint.fmpq_mat(mx.select_rows(X, rows))
    C = Br.solve(Xr)
    if flint.fmpq_mat(B) * C != flint.fmpq_mat(X):
        raise NoSolution("vector outside the span of the basis")
    return C


def integral_coordinates(B: fmpz_mat, X: fmpz_mat, p: int) -> tuple[fmpz_mat | None, int]:
    """Coordinates of ``X`` in ``B``; returns (integer matrix or None, denominator)."""
    C = coordinates(B, X, p)
    num, den = C.numer_denom()
    if int(den) == 1:
        return num, 1
    if int(den) % p == 0:
        raise NoSolution("coordinates are not p-integral")
    return None, int(den)


def prime_factors(n: int) -> list[int]:
    n = abs(int(n))
    if n < 2:
        return []
    return [int(q) for q, _ in flint.fmpz(n).factor()]


def mod_inverse_matrix(B: fmpz_mat, modulus: int) -> fmpz_mat:
    """Inverse of ``B`` modulo ``modulus`` (B must be invertible mod p)."""
    inv = flint.fmpq_mat(B).inv()
    num, den = inv.numer_denom()
    d = pow(int(den), -1, modulus)
    return mx.reduce_mod(num * d, modulus)
