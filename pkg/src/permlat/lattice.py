"""Lattices over p-local group rings and the functors applied to them.

A lattice is ``Z_(p)^rank`` with a group acting by integer matrices on column
vectors: the image of basis vector ``j`` under ``g`` is column ``j`` of
``action[g]``.  Sublattices are stored by a basis of integer columns; a
sublattice with ``precision = k`` is only meaningful modulo ``p**k``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import flint

from . import _matrix as mx
from .exceptions import GroupMismatch, InputError, NotAHomomorphism, NotNormal
from .padic_linalg import (PrecisionContext, is_saturated, kernel_local, local_smith,
                           prime_factors, saturate, saturate_at)
from .pgroup import (PGroup, Subgroup, coset_action, coset_transversal, quotient_group,
                     subgroup_group)

fmpz_mat = flint.fmpz_mat


class Lattice:
    """A group acting on ``Z_(p)^rank`` by integer matrices.

    Parameters
    ----------
    group : PGroup
    action : sequence of fmpz_mat
        One matrix per group element, indexed like the group.
    check : bool
        Verify ``action[g] * action[h] == action[g h]`` for all pairs and that
        generator matrices have determinant +-1.
    """

    def __init__(self, group: PGroup, action: Sequence, check: bool = True, name: str | None = None):
        self.group = group
        self.action = tuple(mx.as_mat(a) for a in action)
        if len(self.action) != group.order:
            raise InputError(f"need {group.order} action matrices, got {len(self.action)}")
        self.rank = self.action[0].nrows() if group.order else 0
        self.name = name
        if check:
            self._check()

    def _check(self):
        n = self.rank
        G = self.group
        for a in self.action:
            if a.nrows() != n or a.ncols() != n:
                raise InputError("action matrices must be square of equal size")
        if n == 0:
            return
        if self.action[0] != mx.identity(n):
            raise NotAHomomorphism("identity does not act as the identity matrix")
        for g in G.generators:
            if abs(int(self.action[g].det())) != 1:
                raise NotAHomomorphism(f"action of element {g} is not unimodular")
        for g in range(G.order):
            ag = self.action[g]
            row = G.mul[g]
            for h in range(G.order):
                if ag * self.action[h] != self.action[row[h]]:
                    raise NotAHomomorphism(f"action is not multiplicative at elements ({g}, {h})")

    @classmethod
    def from_generators(cls, group: PGroup, gens: Mapping, check: bool = True, name=None) -> "Lattice":
        """Build the full action from matrices of the designated generators.

        ``gens`` maps generator names (or generator indices) to matrices; the
        remaining matrices are products along a breadth-first word search.
        """
        mats = {}
        for k, v in gens.items():
            g = group.generator_index(k) if isinstance(k, str) else int(k)
            mats[g] = mx.as_mat(v)
        missing = [nm for g, nm in zip(group.generators, group.generator_names) if g not in mats]
        if missing:
            raise InputError(f"missing action for generators {missing}")
        if not mats:
            raise InputError("trivial group needs an explicit rank; use trivial_lattice")
        n = next(iter(mats.values())).nrows()
        action: list = [None] * group.order
        action[0] = mx.identity(n)
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in group.generators:
                    y = group.mul[x][g]
                    if action[y] is None:
                        action[y] = action[x] * mats[g]
                        nxt.append(y)
            frontier = nxt
        if any(a is None for a in action):
            raise InputError("generators do not generate the group")
        for g in group.generators:
            if action[g] != mats[g]:
                raise NotAHomomorphism("generator matrices are inconsistent with the group table")
        return cls(group, action, check=check, name=name)

    def generator_matrices(self) -> dict[str, fmpz_mat]:
        return {nm: self.action[g] for g, nm in zip(self.group.generators, self.group.generator_names)}

    def __repr__(self):
        nm = f" {self.name}" if self.name else ""
        return f"<Lattice{nm} rank={self.rank} over {self.group!r}>"


@dataclass(frozen=True)
class Sublattice:
    """Columns of ``basis`` span a sublattice of ``ambient``.

    ``precision`` is None for exact bases and ``k`` for bases only known
    modulo ``p**k``.
    """

    ambient: Lattice
    basis: fmpz_mat
    invariant: bool = False
    saturated: bool = False
    precision: int | None = None

    @property
    def rank(self) -> int:
        return self.basis.ncols()

    def as_lattice(self) -> Lattice:
        """The restricted action, on a basis with the same p-local span."""
        return restricted_lattice(self.ambient, self.basis)


@dataclass(frozen=True)
class HomSpace:
    """A basis of the intertwiners ``source -> target`` (target x source matrices)."""

    source: Lattice
    target: Lattice
    basis: tuple

    @property
    def rank(self) -> int:
        return len(self.basis)


def _same_group(A: Lattice, B: Lattice):
    if A.group is not B.group:
        raise GroupMismatch("lattices are over different groups")


def _ctx(G: PGroup, ctx: PrecisionContext | None) -> PrecisionContext:
    if ctx is None:
        return PrecisionContext(G.p)
    if ctx.p != G.p:
        raise InputError(f"prime {ctx.p} does not match the group prime {G.p}")
    return ctx


# --------------------------------------------------------------------------
# constructions

def trivial_lattice(G: PGroup, rank: int = 1) -> Lattice:
    I = mx.identity(rank)
    return Lattice(G, [I] * G.order, check=False, name="trivial")


def zero_lattice(G: PGroup) -> Lattice:
    return trivial_lattice(G, 0)


def sign_lattice(G: PGroup, kernel: Subgroup | None = None) -> Lattice:
    """Rank one, elements outside an index-2 subgroup acting by -1."""
    if G.p != 2:
        raise InputError("a sign lattice needs p = 2")
    if kernel is None:
        if G.order != 2:
            raise InputError("give the index-2 kernel for groups other than C2")
        kernel = G.trivial_subgroup()
    kernel = G.as_subgroup(kernel)
    if 2 * kernel.order != G.order:
        raise InputError("sign kernel must have index 2")
    plus, minus = mx.as_mat([[1]]), mx.as_mat([[-1]])
    return Lattice(G, [plus if g in kernel else minus for g in range(G.order)], check=False, name="sign")


def permutation_lattice(G: PGroup, K) -> Lattice:
    """``Z_(p)[G/K]`` on the coset basis from ``coset_transversal``."""
    K = G.as_subgroup(K)
    tr = coset_transversal(G, K)
    act = coset_action(G, K, tr)
    n = len(tr)
    mats = []
    for g in range(G.order):
        m = fmpz_mat(n, n)
        for i, j in enumerate(act[g]):
            m[j, i] = 1
        mats.append(m)
    return Lattice(G, mats, check=False, name=f"Z[G/K{len(K)}]")


def regular_lattice(G: PGroup) -> Lattice:
    return permutation_lattice(G, G.trivial_subgroup())


def direct_sum(*lattices: Lattice) -> Lattice:
    if len(lattices) == 1 and isinstance(lattices[0], (list, tuple)):
        lattices = tuple(lattices[0])
    if not lattices:
        raise InputError("direct_sum needs at least one lattice")
    G = lattices[0].group
    for L in lattices[1:]:
        _same_group(lattices[0], L)
    nonzero = [L for L in lattices if L.rank]
    if not nonzero:
        return zero_lattice(G)
    if len(nonzero) == 1:
        return nonzero[0]
    mats = [mx.block_diag([L.action[g] for L in nonzero]) for g in range(G.order)]
    return Lattice(G, mats, check=False)


def conjugate(M: Lattice, P: fmpz_mat, P_inv: fmpz_mat | None = None) -> Lattice:
    """The same module on the basis given by the columns of unimodular ``P``.

    New action: ``P^-1 action(g) P``.
    """
    if P_inv is None:
        inv = flint.fmpq_mat(P).inv()
        P_inv = mx.fmpq_to_fmpz(inv)
        if P_inv is None:
            raise InputError("basis change must be unimodular over the integers")
    mats = [P_inv * a * P for a in M.action]
    return Lattice(M.group, mats, check=False, name=M.name)


def random_unimodular(n: int, rng: random.Random, steps: int | None = None) -> tuple[fmpz_mat, fmpz_mat]:
    """A random product of +-1 transvections and its exact inverse."""
    if n == 0:
        return fmpz_mat(0, 0), fmpz_mat(0, 0)
    if steps is None:
        steps = 2 * n
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    Q = [[int(i == j) for j in range(n)] for i in range(n)]
    if n > 1:
        for _ in range(steps):
            i, j = rng.sample(range(n), 2)
            s = rng.choice((1, -1))
            # column op on P: col_j += s col_i ; inverse row op on Q: row_i -= s row_j
            for row in P:
                row[j] += s * row[i]
            Q[i] = [a - s * b for a, b in zip(Q[i], Q[j])]
    perm = list(range(n))
    rng.shuffle(perm)
    P = [[row[perm[j]] for j in range(n)] for row in P]
    Q = [Q[perm[i]] for i in range(n)]
    return mx.as_mat(P), mx.as_mat(Q)


def scramble(M: Lattice, seed: int = 0) -> tuple[Lattice, fmpz_mat]:
    """Conjugate by a seeded random unimodular matrix; returns (lattice, P)."""
    rng = random.Random(seed)
    P, Q = random_unimodular(M.rank, rng)
    return conjugate(M, P, Q), P


# --------------------------------------------------------------------------
# functors

def restrict(M: Lattice, K) -> Lattice:
    """``M`` viewed over the subgroup ``K`` (repackaged as its own PGroup)."""
    G = M.group
    K = G.as_subgroup(K)
    if K.order == G.order:
        return M
    sg = subgroup_group(G, K)
    return Lattice(sg.group, [M.action[g] for g in sg.embedding], check=False, name=M.name)


def quotient_lattice_of(M: Lattice, N) -> Lattice:
    """``M`` as a ``G/N``-lattice; ``N`` must act trivially."""
    G = M.group
    N = G.as_subgroup(N)
    q = quotient_group(G, N)
    for n in N.elements:
        if M.action[n] != mx.identity(M.rank):
            raise InputError("the normal subgroup does not act trivially")
    return Lattice(q.group, [M.action[g] for g in q.lifts], check=False, name=M.name)


def _integral_action(B: fmpz_mat, mats: Sequence[fmpz_mat], p: int) -> tuple[fmpz_mat, list[fmpz_mat]]:
    """Rebase ``B`` until every ``m B`` has integer coordinates ``Y`` in it.

    The p-local span of ``B`` must be invariant under ``mats``; coordinate
    denominators are then prime to p, and saturating at those primes does not
    change the p-local span.
    """
    d = B.ncols()
    if d == 0:
        return B, [fmpz_mat(0, 0) for _ in mats]
    while True:
        rows = mx.pivot_columns_mod(B.transpose(), p)
        if len(rows) != d:
            raise InputError("basis is not independent modulo p")
        Binv = flint.fmpq_mat(mx.select_rows(B, rows)).inv()
        Ys = []
        bad = 1
        for m in mats:
            X = m * B
            Yq = Binv * flint.fmpq_mat(mx.select_rows(X, rows))
            num, den = Yq.numer_denom()
            den = int(den)
            if den % p == 0:
                raise InputError("span is not invariant under the action")
            if den != 1:
                bad = bad * den // _gcd(bad, den)
                Ys.append(None)
                continue
            if B * num != X:
                raise InputError("span is not invariant under the action")
            Ys.append(num)
        if bad == 1:
            return B, Ys
        for q in prime_factors(bad):
            B = saturate_at(B, q)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _action_from_generators(G: PGroup, gen_mats: dict, n: int) -> list:
    action: list = [None] * G.order
    action[0] = mx.identity(n)
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in G.generators:
                y = G.mul[x][g]
                if action[y] is None:
                    action[y] = action[x] * gen_mats[g]
                    nxt.append(y)
        frontier = nxt
    return action


def restricted_lattice(M: Lattice, B: fmpz_mat, return_basis: bool = False):
    """The action of ``M`` restricted to the invariant span of ``B``."""
    G = M.group
    B2, Ys = _integral_action(B, [M.action[g] for g in G.generators], G.p)
    n = B2.ncols()
    if G.order > 1 and G.generators:
        action = _action_from_generators(G, dict(zip(G.generators, Ys)), n)
    else:
        action = [mx.identity(n)] * G.order
    L = Lattice(G, action, check=False)
    return (L, B2) if return_basis else L


def invariants(M: Lattice, K, ctx: PrecisionContext | None = None) -> Sublattice:
    """Saturated sublattice of K-fixed vectors."""
    G = M.group
    ctx = _ctx(G, ctx)
    K = G.as_subgroup(K)
    n = M.rank
    gens = G.subgroup_generators(K)
    if n == 0:
        return Sublattice(M, fmpz_mat(0, 0), K.is_normal, True)
    if not gens:
        return Sublattice(M, mx.identity(n), True, True)
    I = mx.identity(n)
    A = mx.vstack([M.action[k] - I for k in gens], n)
    B = kernel_local(A, ctx)
    return Sublattice(M, B, invariant=K.is_normal, saturated=True)


def invariants_lattice(M: Lattice, N, ctx: PrecisionContext | None = None) -> Lattice:
    """``M^N`` as a lattice over ``G/N`` (N normal)."""
    G = M.group
    N = G.as_subgroup(N)
    if not N.is_normal:
        raise NotNormal("invariants carry a quotient action only for normal subgroups")
    S = invariants(M, N, ctx)
    L = restricted_lattice(M, S.basis)
    return quotient_lattice_of(L, N)


@dataclass(frozen=True)
class QuotientResult:
    """``M / S`` modulo torsion, with the projection ``phi`` (rows) onto it.

    ``torsion_exponents`` lists the positive p-adic exponents of the torsion
    of ``M / S`` over the p-local integers.
    """

    lattice: Lattice
    phi: fmpz_mat
    torsion_exponents: tuple[int, ...] = field(default=())


def quotient(M: Lattice, S: fmpz_mat, ctx: PrecisionContext | None = None) -> QuotientResult:
    """Quotient by the span of the columns of ``S`` (assumed invariant)."""
    G = M.group
    ctx = _ctx(G, ctx)
    n = M.rank
    if S.ncols() == 0 or mx.rank_q(S) == 0:
        tors: tuple = ()
        Phi = mx.identity(n)
    else:
        sf = local_smith(S, ctx)
        tors = tuple(a for a in sf.elementary_exponents if a > 0)
        Phi = kernel_local(S.transpose(), ctx).transpose()
    if Phi.nrows() == 0:
        return QuotientResult(zero_lattice(G), Phi, tors)
    # phi rho(g) = Y_g phi  <=>  rho(g)^T phi^T = phi^T Y_g^T
    B, Ys = _integral_action(Phi.transpose(), [M.action[g].transpose() for g in G.generators], G.p)
    Phi = B.transpose()
    r = Phi.nrows()
    if G.generators:
        action = _action_from_generators(G, {g: Y.transpose() for g, Y in zip(G.generators, Ys)}, r)
    else:
        action = [mx.identity(r)] * G.order
    return QuotientResult(Lattice(G, action, check=False), Phi, tors)


@dataclass(frozen=True)
class Coinvariants:
    """``M_K`` modulo torsion, plus the torsion exponents and a G/K view."""

    lattice: Lattice
    torsion_exponents: tuple[int, ...]
    over_quotient: Lattice | None = None

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def has_torsion(self) -> bool:
        return bool(self.torsion_exponents)


def coinvariants(M: Lattice, K, ctx: PrecisionContext | None = None) -> Coinvariants:
    G = M.group
    ctx = _ctx(G, ctx)
    K = G.as_subgroup(K)
    gens = G.subgroup_generators(K)
    n = M.rank
    I = mx.identity(n)
    if gens and n:
        S = mx.hstack([M.action[k] - I for k in gens], n)
    else:
        S = fmpz_mat(n, 0)
    if K.is_normal:
        res = quotient(M, S, ctx)
        L = res.lattice
        over = quotient_lattice_of(L, K)
    else:
        # only the K-action descends; compute over K
        res = quotient(restrict(M, K), S, ctx)
        L, over = res.lattice, None
    return Coinvariants(L, res.torsion_exponents, over)


def induce(K, L: Lattice, G: PGroup) -> Lattice:
    """Induce a lattice over the subgroup ``K`` of ``G`` (L over subgroup_group(G, K))."""
    K = G.as_subgroup(K)
    if K.order == G.order and L.group is G:
        return L
    sg = subgroup_group(G, K)
    if L.group is not sg.group:
        raise GroupMismatch("lattice is not over the subgroup group of K")
    local = {g: i for i, g in enumerate(sg.embedding)}
    tr = coset_transversal(G, K)
    cm = coset_action(G, K, tr)
    r = L.rank
    t = len(tr)
    mats = []
    for g in range(G.order):
        m = fmpz_mat(t * r, t * r)
        for i, ri in enumerate(tr):
            j = cm[g][i]
            k = G.mul[G.inverse[tr[j]]][G.mul[g][ri]]
            blk = L.action[local[k]].tolist()
            for a in range(r):
                for b in range(r):
                    if blk[a][b]:
                        m[j * r + a, i * r + b] = blk[a][b]
        mats.append(m)
    return Lattice(G, mats, check=False)


def hom_space(A: Lattice, B: Lattice, ctx: PrecisionContext | None = None) -> HomSpace:
    """All intertwiners ``T`` with ``T rho_A(g) = rho_B(g) T``."""
    _same_group(A, B)
    G = A.group
    ctx = _ctx(G, ctx)
    ra, rb = A.rank, B.rank
    nvar = ra * rb
    if nvar == 0:
        return HomSpace(A, B, ())
    gens = G.generators
    if not gens:
        basis = []
        for i in range(rb):
            for j in range(ra):
                T = fmpz_mat(rb, ra)
                T[i, j] = 1
                basis.append(T)
        return HomSpace(A, B, tuple(basis))
    rows = []
    for g in gens:
        a = mx.to_lists(A.action[g])
        b = mx.to_lists(B.action[g])
        # equation (i, j): sum_k T[i,k] a[k][j] - sum_k b[i][k] T[k,j] = 0 ; var T[i,k] -> i*ra + k
        for i in range(rb):
            for j in range(ra):
                row = [0] * nvar
                for k in range(ra):
                    if a[k][j]:
                        row[i * ra + k] += a[k][j]
                for k in range(rb):
                    if b[i][k]:
                        row[k * ra + j] -= b[i][k]
                rows.append(row)
    K = kernel_local(mx.as_mat(rows), ctx)
    basis = []
    for c in mx.columns(K):
        basis.append(mx.as_mat([c[i * ra:(i + 1) * ra] for i in range(rb)]))
    return HomSpace(A, B, tuple(basis))


def is_intertwiner(T: fmpz_mat, A: Lattice, B: Lattice) -> bool:
    return all(T * A.action[g] == B.action[g] * T for g in A.group.generators)


def sublattice(M: Lattice, basis, ctx: PrecisionContext | None = None) -> Sublattice:
    """Wrap a basis, recording invariance and saturation."""
    B = mx.as_mat(basis) if not isinstance(basis, fmpz_mat) else basis
    p = M.group.p
    inv = True
    try:
        _integral_action(B, [M.action[g] for g in M.group.generators], p)
    except InputError:
        inv = False
    return Sublattice(M, B, invariant=inv, saturated=is_saturated(B, p))


def saturated_span(M: Lattice, vectors: fmpz_mat, ctx: PrecisionContext | None = None) -> fmpz_mat:
    """Saturation of the G-span of the columns of ``vectors``."""
    G = M.group
    ctx = _ctx(G, ctx)
    if vectors.ncols() == 0:
        return fmpz_mat(M.rank, 0)
    S = mx.hstack([M.action[g] * vectors for g in range(G.order)], M.rank)
    return saturate(S, M.rank, ctx)
