"""Endomorphism rings, their radicals modulo p, and idempotent lifting."""
from __future__ import annotations

import random
from dataclasses import dataclass

import flint

from .. import _matrix as mx
from ..exceptions import InternalInconsistency, NotIdempotentModP
from ..lattice import Lattice, _ctx, hom_space
from ..padic_linalg import PrecisionContext, prime_factors, saturate_at

fmpz_mat = flint.fmpz_mat
nmod_mat = flint.nmod_mat
nmod_poly = flint.nmod_poly


def flatten(m: fmpz_mat) -> list[int]:
    return [int(x) for x in m.entries()]


def unflatten(v, n: int) -> fmpz_mat:
    return mx.as_mat([list(v[i * n:(i + 1) * n]) for i in range(n)]) if n else fmpz_mat(0, 0)


@dataclass(frozen=True)
class EndRing:
    """``End(M)`` with an integral basis and structure constants.

    ``mult_table[i][j]`` holds the coordinates of ``basis[i] * basis[j]``.
    """

    module: Lattice
    basis: tuple
    mult_table: tuple
    identity_coords: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)

    def element(self, coords) -> fmpz_mat:
        n = self.module.rank
        out = fmpz_mat(n, n)
        for c, b in zip(coords, self.basis):
            if c:
                out += int(c) * b
        return out


class _ModPBasis:
    """Coordinates with respect to a basis of flattened matrices modulo p."""

    def __init__(self, mats, p: int, n: int):
        self.p = p
        self.n = n
        self.mats = list(mats)
        d = len(self.mats)
        self.dim = d
        if d == 0:
            self.rows = []
            return
        F = mx.from_columns([flatten(m) for m in self.mats], n * n)
        self.rows = mx.pivot_columns_mod(F.transpose(), p)
        if len(self.rows) != d:
            raise InternalInconsistency("basis is dependent modulo p")
        self.inv = mx.mod_p(mx.select_rows(F, self.rows), p).inv()

    def coords(self, m: fmpz_mat) -> list[int]:
        if self.dim == 0:
            return []
        v = flatten(m)
        x = nmod_mat([[v[r]] for r in self.rows], self.p)
        return [int(c) for c in (self.inv * x).entries()]

    def contains(self, m: fmpz_mat) -> bool:
        c = self.coords(m) if self.dim else []
        rec = fmpz_mat(self.n, self.n)
        for a, b in zip(c, self.mats):
            if a:
                rec += a * b
        return mx.is_zero_mod(rec - m, self.p)


def endomorphism_ring(M: Lattice, ctx: PrecisionContext | None = None) -> EndRing:
    ctx = _ctx(M.group, ctx)
    p = ctx.p
    n = M.rank
    basis = list(hom_space(M, M, ctx).basis)
    d = len(basis)
    if d == 0:
        return EndRing(M, (), (), ())
    while True:
        F = mx.from_columns([flatten(b) for b in basis], n * n)
        rows = mx.pivot_columns_mod(F.transpose(), p)
        Finv = flint.fmpq_mat(mx.select_rows(F, rows)).inv()
        prods = [flatten(a * b) for a in basis for b in basis] + [flatten(mx.identity(n))]
        X = mx.from_columns(prods, n * n)
        C = Finv * flint.fmpq_mat(mx.select_rows(X, rows))
        num, den = C.numer_denom()
        den = int(den)
        if den == 1:
            break
        if den % p == 0:
            raise InternalInconsistency("endomorphism basis is not closed under products")
        for q in prime_factors(den):
            F = saturate_at(F, q)
        basis = [unflatten([int(x) for x in col], n) for col in mx.columns(F)]
    if F * num != X:
        raise InternalInconsistency("endomorphism products leave the span of the basis")
    cols = mx.columns(num)
    table = tuple(tuple(tuple(cols[i * d + j]) for j in range(d)) for i in range(d))
    return EndRing(M, tuple(basis), table, tuple(cols[d * d]))


# --------------------------------------------------------------------------
# the algebra E / pE

@dataclass(frozen=True)
class RadicalData:
    """Radical of ``E/pE`` and a complete set of orthogonal primitive idempotents.

    All matrices have entries in ``[0, p)``.  ``local_certificates[i]`` is
    the element whose image generates the residue field of the corner ring
    of ``idempotents[i]``.
    """

    radical: tuple
    idempotents: tuple
    local_certificates: tuple

    @property
    def is_local(self) -> bool:
        return len(self.idempotents) == 1


def _mod(m: fmpz_mat, p: int) -> fmpz_mat:
    return mx.reduce_mod(m, p)


def _span_mod(mats, p: int, n: int) -> list[fmpz_mat]:
    """Echelon basis of the span of matrices modulo p."""
    mats = list(mats)
    if not mats or n == 0:
        return []
    A = mx.mod_p(mx.as_mat([flatten(m) for m in mats]), p)
    R, r = A.rref()
    rows = R.tolist()
    return [unflatten([int(x) for x in rows[i]], n) for i in range(r)]


def _trace_power_div(a: fmpz_mat, p: int, i: int) -> int:
    """``Tr(a^(p^i)) / p^i mod p`` for an integer lift ``a``."""
    modulus = p ** (i + 1)
    x = a
    for _ in range(i):
        y = x
        for _ in range(p - 1):
            y = mx.reduce_mod(y * x, modulus)
        x = y
    tr = sum(int(x[k, k]) for k in range(x.nrows())) % modulus
    if tr % (p ** i):
        raise InternalInconsistency("trace of a p-power is not divisible as expected")
    return (tr // p ** i) % p


def _radical(A: list[fmpz_mat], p: int, n: int) -> list[fmpz_mat]:
    """Radical of the matrix algebra spanned by ``A`` over the field with p elements.

    Uses the chain of trace-form kernels I_0 > I_1 > ... > I_l, l = floor(log_p n),
    for algebras of matrices over a prime field.
    """
    l = 0
    while p ** (l + 1) <= n:
        l += 1
    I = list(A)
    for i in range(l + 1):
        if not I:
            break
        rows = []
        for b in A:
            rows.append([_trace_power_div(_mod(a * b, p), p, i) for a in I])
        G = nmod_mat(rows, p)
        K, nul = G.nullspace()
        Kl = K.tolist()
        new = []
        for c in range(nul):
            m = fmpz_mat(n, n)
            for k, a in enumerate(I):
                coef = int(Kl[k][c])
                if coef:
                    m += coef * a
            new.append(_mod(m, p))
        I = _span_mod(new, p, n)
    return I


def _is_nilpotent_ideal(R, A, p, n) -> bool:
    if not R:
        return True
    span = _ModPBasis(R, p, n)
    for r in R:
        for a in A:
            if not span.contains(_mod(r * a, p)) or not span.contains(_mod(a * r, p)):
                return False
    power = list(R)
    for _ in range(n + 1):
        power = _span_mod([_mod(x * r, p) for x in power for r in R], p, n)
        if not power:
            return True
    return False


def _poly_at(f: nmod_poly, x: fmpz_mat, e: fmpz_mat, p: int) -> fmpz_mat:
    """``f(x) * e`` modulo p (x commutes with e and x e = x)."""
    coeffs = [int(c) for c in f.coeffs()]
    out = fmpz_mat(x.nrows(), x.ncols())
    for c in reversed(coeffs):
        out = _mod(out * x, p)
        if c:
            out += c * e
    return _mod(out, p)


def _split_corner(e: fmpz_mat, Ae: list, Re: list, p: int, n: int, rng: random.Random,
                  out_idem: list, out_cert: list, tries: int = 400):
    """Append primitive idempotents summing to ``e`` (recursively)."""
    q = len(Ae) - len(Re)
    if q <= 0:
        raise InternalInconsistency("nonzero idempotent inside the radical")
    Rspan = _ModPBasis(Re, p, n) if Re else None
    for _ in range(tries):
        x = fmpz_mat(n, n)
        for b in Ae:
            c = rng.randrange(p)
            if c:
                x += c * b
        x = _mod(x, p)
        chi = nmod_mat(x, p).charpoly()
        _, facs = chi.factor()
        comps = []
        for f, a in facs:
            fa = f ** a
            g = chi // fa
            _, s, t = fa.xgcd(g)
            u = (t * g) % chi
            c = _poly_at(u, x, e, p)
            if not c.is_zero():
                comps.append((c, f))
        if len(comps) >= 2:
            c1 = comps[0][0]
            rest = _mod(e - c1, p)
            for c in (c1, rest):
                A_c = _span_mod([_mod(c * b * c, p) for b in Ae], p, n)
                R_c = _span_mod([_mod(c * r * c, p) for r in Re], p, n)
                _split_corner(c, A_c, R_c, p, n, rng, out_idem, out_cert, tries)
            return
        if len(comps) == 1:
            f = comps[0][1]
            if f.degree() == q:
                fx = _poly_at(f, x, e, p)
                if fx.is_zero() or (Rspan is not None and Rspan.contains(fx)):
                    out_idem.append(e)
                    out_cert.append(x)
                    return
    raise InternalInconsistency("could not split or certify a corner ring as local")


def radical_and_simples_mod_p(E: EndRing, ctx: PrecisionContext | None = None, seed: int = 0) -> RadicalData:
    ctx = _ctx(E.module.group, ctx)
    p = ctx.p
    n = E.module.rank
    if n == 0:
        return RadicalData((), (), ())
    A = _span_mod([_mod(b, p) for b in E.basis], p, n)
    R = _radical(A, p, n)
    if not _is_nilpotent_ideal(R, A, p, n):
        raise InternalInconsistency("computed radical is not a nilpotent ideal")
    idem: list = []
    cert: list = []
    _split_corner(mx.identity(n), A, R, p, n, random.Random(seed), idem, cert)
    return RadicalData(tuple(R), tuple(idem), tuple(cert))


# --------------------------------------------------------------------------
# lifting

def symmetric_residue(m: fmpz_mat, modulus: int) -> fmpz_mat:
    half = modulus // 2
    return mx.as_mat([[((int(x) + half) % modulus) - half for x in row] for row in m.tolist()]) \
        if m.nrows() and m.ncols() else m


def to_end_element(e0: fmpz_mat, E: EndRing, p: int) -> fmpz_mat:
    """An exact element of End congruent to ``e0`` mod p (raises if e0 is outside E/pE)."""
    n = E.module.rank
    basis_p = _ModPBasis([_mod(b, p) for b in E.basis], p, n)
    c = basis_p.coords(_mod(e0, p))
    x = E.element(c)
    if not mx.is_zero_mod(x - e0, p):
        raise NotIdempotentModP("matrix is not in the endomorphism ring modulo p")
    return x


def hensel_idempotent(x: fmpz_mat, p: int, cap: int) -> fmpz_mat:
    """Iterate ``e <- 3e^2 - 2e^3`` modulo ``p**cap``."""
    modulus = p ** cap
    e = mx.reduce_mod(x, modulus)
    steps = max(1, (cap - 1).bit_length())
    for _ in range(steps):
        e2 = mx.reduce_mod(e * e, modulus)
        e = mx.reduce_mod(3 * e2 - 2 * mx.reduce_mod(e2 * e, modulus), modulus)
    return symmetric_residue(e, modulus)


def lift_idempotent(e0, E: EndRing, ctx: PrecisionContext | None = None) -> fmpz_mat:
    """An element of End with ``e^2 = e`` mod ``p**cap`` and ``e = e0`` mod p."""
    ctx = _ctx(E.module.group, ctx)
    p = ctx.p
    e0 = mx.as_mat(e0)
    if not mx.is_zero_mod(e0 * e0 - e0, p):
        raise NotIdempotentModP("e0 is not idempotent modulo p")
    x = to_end_element(e0, E, p)
    e = hensel_idempotent(x, p, ctx.cap)
    if not mx.is_zero_mod(e * e - e, ctx.modulus):
        raise InternalInconsistency("Hensel iteration did not converge")
    return e


def lift_orthogonal(idems, E: EndRing, ctx: PrecisionContext) -> list[fmpz_mat]:
    """Lift orthogonal idempotents mod p summing to 1, one corner at a time."""
    p, cap = ctx.p, ctx.cap
    modulus = p ** cap
    n = E.module.rank
    out = []
    rest = mx.identity(n)
    for k, e0 in enumerate(idems):
        if k == len(idems) - 1:
            out.append(symmetric_residue(mx.reduce_mod(rest, modulus), modulus))
            break
        x = to_end_element(e0, E, p)
        x = mx.reduce_mod(rest * x * rest, modulus)
        e = hensel_idempotent(x, p, cap)
        out.append(e)
        rest = symmetric_residue(mx.reduce_mod(rest - e, modulus), modulus)
    return out
