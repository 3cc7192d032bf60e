"""Finite p-groups as multiplication tables.

Elements are the integers ``0 .. order-1`` with ``0`` the identity.  Groups
built from permutations list their elements in breadth-first closure order
from the generators, and ``mul[i][j]`` is the permutation ``perm_i o perm_j``
(apply ``j`` first).  Everything is brute force; orders are capped at 256.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .exceptions import InputError, NotASubgroup, NotNormal, OrderCapExceeded, OrderNotPPower

DEFAULT_ORDER_CAP = 256


def _prime_of_power(n: int) -> int | None:
    """The prime ``p`` with ``n = p**k`` (k >= 1), else None."""
    if n < 2:
        return None
    p = 2
    while n % p:
        p += 1
    while n % p == 0:
        n //= p
    return p if n == 1 else None


def perm_from_cycles(cycles: Sequence[Sequence[int]], degree: int) -> tuple[int, ...]:
    img = list(range(degree))
    seen = set()
    for cyc in cycles:
        cyc = [int(x) for x in cyc]
        for x in cyc:
            if not 0 <= x < degree:
                raise InputError(f"point {x} outside 0..{degree - 1}")
            if x in seen:
                raise InputError(f"point {x} appears in two cycles")
            seen.add(x)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            img[a] = b
    return tuple(img)


def _compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    # a o b : x -> a[b[x]]
    return tuple(a[x] for x in b)


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup, stored as its sorted element indices."""

    elements: tuple[int, ...]
    is_normal: bool = False

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g):
        return g in self._set

    @property
    def _set(self) -> frozenset:
        s = self.__dict__.get("_fs")
        if s is None:
            s = frozenset(self.elements)
            object.__setattr__(self, "_fs", s)
        return s

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        return f"Subgroup(order={self.order}, elements={list(self.elements)})"


class PGroup:
    """A finite p-group given by its full multiplication table.

    Parameters
    ----------
    mul : sequence of sequences of int
        ``mul[i][j]`` is the index of the product of elements i and j.
    generators : sequence of int
        Designated generators.
    p : int, optional
        The prime; inferred from the order unless the group is trivial.
    generator_names : sequence of str, optional
    check : bool
        Verify the group axioms (associativity exhaustively up to order 64,
        on sampled triples above).
    """

    def __init__(self, mul, generators, p=None, generator_names=None, name=None,
                 perms=None, check=True, order_cap=DEFAULT_ORDER_CAP):
        mul = tuple(tuple(int(x) for x in row) for row in mul)
        n = len(mul)
        if n > order_cap:
            raise OrderCapExceeded(f"group order {n} exceeds cap {order_cap}")
        q = _prime_of_power(n)
        if n == 1:
            if p is None:
                raise InputError("the prime must be given for the trivial group")
            q = p
        if q is None:
            raise OrderNotPPower(f"group order {n} is not a prime power")
        if p is not None and q != p:
            raise OrderNotPPower(f"group order {n} is not a power of p = {p}")
        self.order = n
        self.p = q
        self.mul = mul
        self.identity = 0
        self.generators = tuple(int(g) for g in generators)
        if generator_names is None:
            generator_names = [f"g{i}" for i in range(len(self.generators))]
        self.generator_names = tuple(generator_names)
        self.name = name
        self.perms = perms
        if check:
            self._check()
        self.inverse = tuple(row.index(0) for row in mul)
        self.element_orders = tuple(self._element_order(g) for g in range(n))
        if check:
            for o in self.element_orders:
                if o > 1 and _prime_of_power(o) != self.p:
                    raise OrderNotPPower(f"element order {o} is not a power of {self.p}")
        self._classification = None
        self._derived: dict = {}

    def _check(self):
        n = self.order
        mul = self.mul
        if any(len(row) != n for row in mul):
            raise InputError("multiplication table is not square")
        if any(not 0 <= x < n for row in mul for x in row):
            raise InputError("multiplication table entry out of range")
        if any(mul[0][i] != i or mul[i][0] != i for i in range(n)):
            raise InputError("element 0 is not the identity")
        for row in mul:
            if 0 not in row:
                raise InputError("an element has no inverse")
        if n <= 64:
            triples = ((a, b, c) for a in range(n) for b in range(n) for c in range(n))
        else:
            rng = random.Random(0)
            triples = ((rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(20000))
        for a, b, c in triples:
            if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
                raise InputError(f"multiplication is not associative at {(a, b, c)}")
        for g in self.generators:
            if not 0 <= g < n:
                raise InputError(f"generator index {g} out of range")

    def _element_order(self, g):
        k, x = 1, g
        while x != 0:
            x = self.mul[x][g]
            k += 1
        return k

    # -- basic queries -------------------------------------------------
    def elements(self) -> range:
        return range(self.order)

    def m(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def conj(self, g: int, h: int) -> int:
        """g h g^-1."""
        return self.mul[self.mul[g][h]][self.inverse[g]]

    def power(self, g: int, k: int) -> int:
        x = 0
        for _ in range(k):
            x = self.mul[x][g]
        return x

    def word(self, letters: Iterable[int]) -> int:
        x = 0
        for g in letters:
            x = self.mul[x][g]
        return x

    def generator_index(self, name: str) -> int:
        try:
            return self.generators[self.generator_names.index(name)]
        except ValueError:
            raise InputError(f"unknown generator name {name!r}") from None

    def is_abelian(self) -> bool:
        return all(self.mul[a][b] == self.mul[b][a] for a in range(self.order) for b in range(a))

    def whole(self) -> Subgroup:
        return Subgroup(tuple(range(self.order)), True)

    def trivial_subgroup(self) -> Subgroup:
        return Subgroup((0,), True)

    def closure(self, gens: Iterable[int]) -> frozenset:
        elems = {0}
        gens = [g for g in gens if g != 0]
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul[x][g]
                    if y not in elems:
                        elems.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(elems)

    def subgroup(self, elements: Iterable[int]) -> Subgroup:
        """Validate an element set and wrap it as a Subgroup."""
        s = frozenset(int(x) for x in elements)
        if not s or 0 not in s or any(not 0 <= x < self.order for x in s):
            raise NotASubgroup("element set is empty, lacks the identity or is out of range")
        for a in s:
            if self.inverse[a] not in s:
                raise NotASubgroup("element set is not closed under inverses")
            row = self.mul[a]
            for b in s:
                if row[b] not in s:
                    raise NotASubgroup("element set is not closed under multiplication")
        return Subgroup(tuple(sorted(s)), self._normal(s))

    def generated_subgroup(self, gens: Iterable[int]) -> Subgroup:
        s = self.closure(gens)
        return Subgroup(tuple(sorted(s)), self._normal(s))

    def _normal(self, s: frozenset) -> bool:
        return all(self.conj(g, h) in s for g in self.generators for h in s)

    def as_subgroup(self, K) -> Subgroup:
        """Coerce to a validated Subgroup of this group."""
        if isinstance(K, Subgroup):
            K = K.elements
        return self.subgroup(K)

    def subgroup_generators(self, K: Subgroup) -> tuple[int, ...]:
        """A small generating set of K, chosen greedily in index order."""
        gens: list[int] = []
        span = frozenset([0])
        for x in K.elements:
            if x not in span:
                gens.append(x)
                span = self.closure(gens)
                if len(span) == K.order:
                    break
        return tuple(gens)

    def conjugate_subgroup(self, K: Subgroup, g: int) -> Subgroup:
        return Subgroup(tuple(sorted({self.conj(g, h) for h in K.elements})), K.is_normal)

    def index(self, K: Subgroup) -> int:
        return self.order // K.order

    def __repr__(self):
        nm = f" {self.name}" if self.name else ""
        return f"<PGroup{nm} order={self.order} p={self.p}>"


def from_permutations(gens: Sequence, degree: int, p: int | None = None,
                      names: Sequence[str] | None = None, name: str | None = None,
                      order_cap: int = DEFAULT_ORDER_CAP) -> PGroup:
    """Enumerate the group generated by permutations of ``range(degree)``.

    Each generator is either an image tuple of length ``degree`` or a list of
    cycles.
    """
    perms = []
    for g in gens:
        g = list(g)
        if g and all(isinstance(x, (list, tuple)) for x in g):
            perms.append(perm_from_cycles(g, degree))
        elif not g:
            perms.append(tuple(range(degree)))
        else:
            if sorted(int(x) for x in g) != list(range(degree)):
                raise InputError("generator is not a permutation of the points")
            perms.append(tuple(int(x) for x in g))
    ident = tuple(range(degree))
    elems = [ident]
    index = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in perms:
                y = _compose(x, g)
                if y not in index:
                    index[y] = len(elems)
                    elems.append(y)
                    nxt.append(y)
                    if len(elems) > order_cap:
                        raise OrderCapExceeded(f"generated group exceeds order cap {order_cap}")
        frontier = nxt
    n = len(elems)
    mul = [[index[_compose(a, b)] for b in elems] for a in elems]
    gen_idx = [index[g] for g in perms]
    if names is None:
        names = [f"g{i}" for i in range(len(perms))]
    return PGroup(mul, gen_idx, p=p, generator_names=names, name=name,
                  perms=tuple(elems), check=n <= 64, order_cap=order_cap)


# --------------------------------------------------------------------------
# subgroups

@dataclass(frozen=True)
class SubgroupClassification:
    """All subgroups, conjugacy-class representatives and the class map.

    ``all_subgroups`` is sorted by size, then by element tuple; ``class_reps``
    holds the first member of each class in that order; ``class_of[i]`` is
    the class index of ``all_subgroups[i]``.
    """

    all_subgroups: tuple[Subgroup, ...]
    class_reps: tuple[Subgroup, ...]
    class_of: tuple[int, ...]
    class_sizes: tuple[int, ...] = field(default=())

    def rep_index(self, K: Subgroup) -> int:
        """Index of the class representative conjugate to K."""
        return self.class_of[self._position[K.elements]]

    @property
    def _position(self):
        d = self.__dict__.get("_pos")
        if d is None:
            d = {S.elements: i for i, S in enumerate(self.all_subgroups)}
            object.__setattr__(self, "_pos", d)
        return d

    def label(self, idx: int) -> str:
        return f"K{idx}"

    def label_index(self, label: str) -> int:
        if not label.startswith("K") or not label[1:].isdigit() or int(label[1:]) >= len(self.class_reps):
            raise InputError(f"unknown subgroup class label {label!r}")
        return int(label[1:])


def classify_subgroups(G: PGroup) -> SubgroupClassification:
    """Enumerate all subgroups by joining cyclic subgroups; classify up to conjugacy."""
    if G._classification is not None:
        return G._classification
    cyclic = {}
    for g in range(G.order):
        c = G.closure([g])
        cyclic.setdefault(c, g)
    cyc_list = sorted(cyclic, key=lambda s: (len(s), sorted(s)))
    found = set(cyc_list)
    frontier = list(cyc_list)
    while frontier:
        nxt = []
        for S in frontier:
            for C in cyc_list:
                if C <= S:
                    continue
                J = G.closure(list(S) + [cyclic[C]])
                if J not in found:
                    found.add(J)
                    nxt.append(J)
        frontier = nxt
    subs = sorted((tuple(sorted(s)) for s in found), key=lambda t: (len(t), t))
    all_subs = tuple(Subgroup(t, G._normal(frozenset(t))) for t in subs)
    pos = {S.elements: i for i, S in enumerate(all_subs)}
    class_of = [-1] * len(all_subs)
    reps: list[Subgroup] = []
    sizes: list[int] = []
    for i, S in enumerate(all_subs):
        if class_of[i] >= 0:
            continue
        c = len(reps)
        reps.append(S)
        members = {pos[G.conjugate_subgroup(S, g).elements] for g in range(G.order)}
        for j in members:
            class_of[j] = c
        sizes.append(len(members))
    out = SubgroupClassification(all_subs, tuple(reps), tuple(class_of), tuple(sizes))
    G._classification = out
    return out


def coset_transversal(G: PGroup, K) -> list[int]:
    """Left coset representatives r with G = union of r K; identity first."""
    K = G.as_subgroup(K)
    seen = set()
    reps = []
    for g in range(G.order):
        if g in seen:
            continue
        reps.append(g)
        seen.update(G.mul[g][k] for k in K.elements)
    return reps


def coset_map(G: PGroup, K: Subgroup, transversal: Sequence[int] | None = None) -> list[int]:
    """``out[g]`` is the position in the transversal of the coset g K."""
    if transversal is None:
        transversal = coset_transversal(G, K)
    out = [-1] * G.order
    for i, r in enumerate(transversal):
        for k in K.elements:
            out[G.mul[r][k]] = i
    return out


def coset_action(G: PGroup, K: Subgroup, transversal: Sequence[int] | None = None) -> list[list[int]]:
    """``act[g][i]`` is the coset index of g r_i K."""
    if transversal is None:
        transversal = coset_transversal(G, K)
    cm = coset_map(G, K, transversal)
    return [[cm[G.mul[g][r]] for r in transversal] for g in range(G.order)]


def orbit_count_on_cosets(G: PGroup, K, L) -> int:
    """Number of K-orbits on the left cosets G/L."""
    K = G.as_subgroup(K)
    L = G.as_subgroup(L)
    tr = coset_transversal(G, L)
    act = coset_action(G, L, tr)
    parent = list(range(len(tr)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for k in G.subgroup_generators(K):
        for i in range(len(tr)):
            a, b = find(i), find(act[k][i])
            if a != b:
                parent[a] = b
    return len({find(i) for i in range(len(tr))})


def normalizer(G: PGroup, K) -> Subgroup:
    K = G.as_subgroup(K)
    s = K._set
    elems = [g for g in range(G.order) if all(G.conj(g, h) in s for h in K.elements)]
    return G.subgroup(elems)


def center(G: PGroup) -> Subgroup:
    elems = [z for z in range(G.order) if all(G.mul[z][g] == G.mul[g][z] for g in G.generators)]
    return G.subgroup(elems)


def central_order_p_subgroups(G: PGroup) -> list[Subgroup]:
    Z = center(G)
    seen = {}
    for z in Z.elements:
        if G.element_orders[z] == G.p:
            c = tuple(sorted(G.closure([z])))
            seen.setdefault(c, None)
    return [Subgroup(c, True) for c in sorted(seen)]


def normal_subgroups(G: PGroup) -> list[Subgroup]:
    return [S for S in classify_subgroups(G).all_subgroups if S.is_normal]


# --------------------------------------------------------------------------
# derived groups

@dataclass(frozen=True)
class SubgroupGroup:
    """K repackaged as a PGroup, with the embedding into its parent."""

    group: PGroup
    embedding: tuple[int, ...]  # local index -> parent index


def subgroup_group(G: PGroup, K) -> SubgroupGroup:
    """Cached: repeated calls return the same PGroup object."""
    K = G.as_subgroup(K)
    key = ("sub", K.elements)
    if key in G._derived:
        return G._derived[key]
    if K.order == G.order:
        # the whole group is its own subgroup group, matching restrict()
        G._derived[key] = SubgroupGroup(G, tuple(range(G.order)))
        return G._derived[key]
    gens = G.subgroup_generators(K)
    # local order: breadth-first from the chosen generators, identity first
    order = [0]
    pos = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul[x][g]
                if y not in pos:
                    pos[y] = len(order)
                    order.append(y)
                    nxt.append(y)
        frontier = nxt
    mul = [[pos[G.mul[a][b]] for b in order] for a in order]
    names = []
    for g in gens:
        if g in G.generators:
            names.append(G.generator_names[G.generators.index(g)])
        else:
            names.append(f"e{g}")
    H = PGroup(mul, [pos[g] for g in gens], p=G.p, generator_names=names, check=False)
    out = G._derived[key] = SubgroupGroup(H, tuple(order))
    return out


@dataclass(frozen=True)
class QuotientGroup:
    """G/N as a PGroup, with the projection from G."""

    group: PGroup
    projection: tuple[int, ...]  # parent index -> quotient index
    lifts: tuple[int, ...]  # quotient index -> chosen parent representative


def quotient_group(G: PGroup, N) -> QuotientGroup:
    """Cached like subgroup_group."""
    N = G.as_subgroup(N)
    key = ("quo", N.elements)
    if key in G._derived:
        return G._derived[key]
    if not N.is_normal:
        raise NotNormal("quotient by a non-normal subgroup")
    tr = coset_transversal(G, N)
    cm = coset_map(G, N, tr)
    mul = [[cm[G.mul[a][b]] for b in tr] for a in tr]
    gens = []
    names = []
    for g, nm in zip(G.generators, G.generator_names):
        q = cm[g]
        if q != 0 and q not in gens:
            gens.append(q)
            names.append(nm)
    H = PGroup(mul, gens, p=G.p, generator_names=names, check=False)
    out = G._derived[key] = QuotientGroup(H, tuple(cm), tuple(tr))
    return out


# --------------------------------------------------------------------------
# bundled groups

def _quaternion_regular() -> list[tuple[int, ...]]:
    # elements +-1, +-i, +-j, +-k encoded as (sign, unit) -> index 2*unit + (sign<0)
    table = {  # unit products for 1, i, j, k
        (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
        (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
        (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
        (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
    }

    def mult(a, b):
        sa, ua = (-1 if a % 2 else 1), a // 2
        sb, ub = (-1 if b % 2 else 1), b // 2
        s, u = table[(ua, ub)]
        s *= sa * sb
        return 2 * u + (s < 0)

    # left regular action x -> g x
    return [tuple(mult(g, x) for x in range(8)) for g in (2, 4)]


def _heisenberg3() -> list[tuple[int, ...]]:
    # affine maps of F_3^2, point (x, y) has index 3x + y
    shift = tuple(3 * ((x + 1) % 3) + y for x in range(3) for y in range(3))
    shear = tuple(3 * x + (y + x) % 3 for x in range(3) for y in range(3))
    return [shift, shear]


_BUNDLED = {
    "c2": lambda: from_permutations([[[0, 1]]], 2, names=["c"], name="c2"),
    "c4": lambda: from_permutations([[[0, 1, 2, 3]]], 4, names=["c"], name="c4"),
    "c8": lambda: from_permutations([[list(range(8))]], 8, names=["c"], name="c8"),
    "c2xc2": lambda: from_permutations([[[0, 1], [2, 3]], [[0, 2], [1, 3]]], 4,
                                       names=["c1", "c2"], name="c2xc2"),
    "d4": lambda: from_permutations([[[0, 1, 2, 3]], [[0, 2]]], 4, names=["r", "s"], name="d4"),
    "q8": lambda: from_permutations(_quaternion_regular(), 8, names=["i", "j"], name="q8"),
    "c3xc3": lambda: from_permutations([[[0, 1, 2]], [[3, 4, 5]]], 6, names=["a", "b"], name="c3xc3"),
    "heisenberg3": lambda: from_permutations(_heisenberg3(), 9, names=["x", "y"], name="heisenberg3"),
}

_CACHE: dict[str, PGroup] = {}


def bundled_group_names() -> list[str]:
    return list(_BUNDLED)


def bundled_group(name: str) -> PGroup:
    """One of the shipped groups: c2, c4, c8, c2xc2, d4, q8, c3xc3, heisenberg3."""
    key = name.lower().replace("×", "x")
    if key not in _BUNDLED:
        raise InputError(f"unknown group {name!r}; known: {', '.join(_BUNDLED)}")
    if key not in _CACHE:
        _CACHE[key] = _BUNDLED[key]()
    return _CACHE[key]
