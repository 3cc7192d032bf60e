"""Splitting lattices by idempotents: Krull-Schmidt and isomorphism of indecomposables."""
from __future__ import annotations

from dataclasses import dataclass

import flint

from .. import _matrix as mx
from ..exceptions import NotIndecomposable, PrecisionExhausted
from ..lattice import Lattice, Sublattice, _ctx, hom_space
from ..padic_linalg import PrecisionContext, mod_inverse_matrix
from .endring import (EndRing, RadicalData, endomorphism_ring, hensel_idempotent, lift_orthogonal,
                      radical_and_simples_mod_p, symmetric_residue, to_end_element)

fmpz_mat = flint.fmpz_mat

MAX_RETRIES = 4


@dataclass(frozen=True)
class Decomposition:
    """Indecomposable summands with the lifted idempotents that cut them out.

    Summand bases are only valid modulo ``p**cap`` unless a summand's
    ``precision`` is None.
    """

    module: Lattice
    summands: tuple
    idempotents: tuple
    cap: int

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(s.rank for s in self.summands)

    def basis_matrix(self) -> fmpz_mat:
        return mx.hstack([s.basis for s in self.summands], self.module.rank)


def image_basis(e: fmpz_mat, p: int) -> fmpz_mat:
    """Columns of ``e`` that stay independent modulo p."""
    return mx.select_columns(e, mx.pivot_columns_mod(e, p))


def _exact_summand(M: Lattice, e: fmpz_mat) -> Sublattice | None:
    """The image of ``e`` with an exact basis, when ``e`` is an exact idempotent of End(M)."""
    if e * e != e or any(M.action[g] * e != e * M.action[g] for g in M.group.generators):
        return None
    # the image of an integral idempotent is saturated; HNF rows give a Z-basis
    H = e.transpose().hnf()
    r = mx.rank_q(e)
    B = mx.select_rows(H, range(r)).transpose() if r else fmpz_mat(M.rank, 0)
    return Sublattice(M, B, invariant=True, saturated=True, precision=None)


def _invariant_mod(M: Lattice, B: fmpz_mat, modulus: int) -> bool:
    """``g B = B Y_g`` modulo ``modulus`` for some Y_g, for every generator."""
    r = B.ncols()
    if r == 0:
        return True
    p = M.group.p
    rows = mx.pivot_columns_mod(B.transpose(), p)
    if len(rows) != r:
        return False
    Binv = mod_inverse_matrix(mx.select_rows(B, rows), modulus)
    for g in M.group.generators:
        X = M.action[g] * B
        Y = mx.reduce_mod(Binv * mx.select_rows(X, rows), modulus)
        if not mx.is_zero_mod(X - B * Y, modulus):
            return False
    return True


def _summands_from_idempotents(M: Lattice, lifted, ctx: PrecisionContext):
    p, cap = ctx.p, ctx.cap
    modulus = p ** cap
    out = []
    for e in lifted:
        S = _exact_summand(M, e)
        if S is None:
            B = image_basis(e, p)
            if not _invariant_mod(M, B, modulus):
                return None
            S = Sublattice(M, B, invariant=True, saturated=True, precision=cap)
        out.append(S)
    total = mx.hstack([s.basis for s in out], M.rank) if out else fmpz_mat(M.rank, 0)
    if total.ncols() != M.rank or not mx.det_unit_mod(total, p):
        return None
    return out


def split_by_idempotent(M: Lattice, e, ctx: PrecisionContext | None = None, E: EndRing | None = None):
    """Split ``M`` into the images of ``e`` and ``1 - e``.

    ``e`` only needs to be idempotent modulo p; it is re-lifted from its
    residue with the precision doubled after each failed verification.
    """
    ctx = _ctx(M.group, ctx)
    e = mx.as_mat(e)
    n = M.rank
    p = ctx.p
    exact = [_exact_summand(M, e), _exact_summand(M, mx.identity(n) - e)] if e * e == e else [None, None]
    if exact[0] is not None and exact[1] is not None:
        return exact[0], exact[1]
    if E is None:
        E = endomorphism_ring(M, ctx)
    x = to_end_element(mx.reduce_mod(e, p), E, p)
    cap = ctx.cap
    for _ in range(MAX_RETRIES + 1):
        c = PrecisionContext(p, cap)
        f = hensel_idempotent(x, p, cap)
        res = _summands_from_idempotents(M, [f, symmetric_residue(mx.identity(n) - f, p ** cap)], c)
        if res is not None:
            return res[0], res[1]
        cap *= 2
    raise PrecisionExhausted(f"idempotent split did not verify up to cap {cap // 2}")


def krull_schmidt(M: Lattice, ctx: PrecisionContext | None = None, seed: int = 0,
                  E: EndRing | None = None, rad: RadicalData | None = None) -> Decomposition:
    """Decompose into indecomposables via primitive idempotents of End(M)."""
    ctx = _ctx(M.group, ctx)
    n = M.rank
    if n == 0:
        return Decomposition(M, (), (), ctx.cap)
    if E is None:
        E = endomorphism_ring(M, ctx)
    if rad is None:
        rad = radical_and_simples_mod_p(E, ctx, seed=seed)
    cap = ctx.cap
    for _ in range(MAX_RETRIES + 1):
        c = PrecisionContext(ctx.p, cap)
        lifted = lift_orthogonal(rad.idempotents, E, c)
        res = _summands_from_idempotents(M, lifted, c)
        if res is not None:
            return Decomposition(M, tuple(res), tuple(lifted), cap)
        cap *= 2
    raise PrecisionExhausted(f"Krull-Schmidt split did not verify up to cap {cap // 2}")


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    map: fmpz_mat | None = None

    def __bool__(self):
        return self.isomorphic


def is_indecomposable(M: Lattice, ctx: PrecisionContext | None = None, seed: int = 0) -> bool:
    ctx = _ctx(M.group, ctx)
    if M.rank == 0:
        return False
    return radical_and_simples_mod_p(endomorphism_ring(M, ctx), ctx, seed).is_local


def iso_indecomposable(X: Lattice, Y: Lattice, ctx: PrecisionContext | None = None, seed: int = 0) -> IsoResult:
    """Decide ``X = Y`` for indecomposable lattices by the unit-pairing test.

    Returns an exact isomorphism ``T: X -> Y`` (``T rho_X = rho_Y T``, det a
    p-unit) when one exists.
    """
    ctx = _ctx(X.group, ctx)
    for L, nm in ((X, "X"), (Y, "Y")):
        if not is_indecomposable(L, ctx, seed):
            raise NotIndecomposable(f"{nm} is not indecomposable")
    if X.rank != Y.rank:
        return IsoResult(False)
    p = ctx.p
    F = hom_space(X, Y, ctx).basis
    Gs = hom_space(Y, X, ctx).basis
    # End(X) is local, so the pairing hits a unit iff some basis pair does
    for f in F:
        for g in Gs:
            if mx.det_unit_mod(g * f, p):
                assert mx.det_unit_mod(f, p)
                return IsoResult(True, f)
    return IsoResult(False)
