"""Named groups and lattices shipped with the package, plus seeded random constructions."""
from __future__ import annotations

import random
from dataclasses import dataclass

import flint

from . import _matrix as mx
from .exceptions import InputError
from .lattice import (Lattice, direct_sum, permutation_lattice, regular_lattice, scramble,
                      sign_lattice, trivial_lattice)
from .pgroup import PGroup, Subgroup, bundled_group, bundled_group_names, classify_subgroups
from .decomp import canonical_class_order

fmpz_mat = flint.fmpz_mat

MAX_RANDOM_RANK = 48

# action on the ordered basis (x, a, b); columns are images of basis vectors
PAPER_EXAMPLE_ACTION = {
    "c1": [[1, 0, 0], [0, 0, 1], [0, 1, 0]],
    "c2": [[1, 0, 0], [1, -1, 0], [1, 0, -1]],
}


@dataclass(frozen=True)
class Fixture:
    name: str
    group: PGroup
    lattice: Lattice | None
    description: str
    # generator names spanning the default subgroup for weiss and cp-split verbs
    default_subgroup: tuple = ()


def paper_example() -> Lattice:
    """The rank-3 lattice over C2 x C2 whose restriction and fixed points are permutation
    but which is not a permutation lattice."""
    G = bundled_group("c2xc2")
    return Lattice.from_generators(G, PAPER_EXAMPLE_ACTION, name="paper-example")


def c2_mixed() -> Lattice:
    """Trivial plus two regular summands over C2."""
    G = bundled_group("c2")
    return direct_sum(trivial_lattice(G), regular_lattice(G), regular_lattice(G))


def fixture_names() -> list[str]:
    names = ["paper-example", "sign-c2", "c2-mixed"]
    for g in bundled_group_names():
        names += [f"regular-{g}", f"trivial-{g}"]
    return names + bundled_group_names()


def fixtures() -> list[str]:
    return fixture_names()


def fixture(name: str) -> Fixture:
    if name == "paper-example":
        L = paper_example()
        return Fixture(name, L.group, L, "rank-3 non-permutation lattice over C2 x C2", ("c1",))
    if name == "sign-c2":
        G = bundled_group("c2")
        return Fixture(name, G, sign_lattice(G), "C2 acting by -1 on Z_(2)", ("c",))
    if name == "c2-mixed":
        L = c2_mixed()
        return Fixture(name, L.group, L, "Z_(2) + Z_(2)[C2]^2 over C2", ("c",))
    for prefix, build in (("regular-", regular_lattice), ("trivial-", trivial_lattice)):
        if name.startswith(prefix):
            G = bundled_group(name[len(prefix):])
            L = build(G)
            L.name = name
            return Fixture(name, G, L, f"{prefix[:-1]} lattice of {G.name}")
    if name in bundled_group_names():
        G = bundled_group(name)
        return Fixture(name, G, None, f"group {name} of order {G.order}")
    raise InputError(f"unknown fixture {name!r}")


# --------------------------------------------------------------------------
# random constructions

def random_multiplicities(G: PGroup, rng: random.Random, max_rank: int = MAX_RANDOM_RANK,
                          allowed: list[int] | None = None) -> list[int]:
    """1 to 4 draws of class representatives; redraw when the rank exceeds ``max_rank``."""
    reps = classify_subgroups(G).class_reps
    pool = list(range(len(reps))) if allowed is None else list(allowed)
    while True:
        m = [0] * len(reps)
        for _ in range(rng.randint(1, 4)):
            m[rng.choice(pool)] += 1
        if sum(m[k] * (G.order // reps[k].order) for k in range(len(reps))) <= max_rank:
            return m


def permutation_module(G: PGroup, m: list[int]) -> Lattice:
    """Sum of coset lattices in canonical block order."""
    reps = classify_subgroups(G).class_reps
    parts = [permutation_lattice(G, reps[k]) for k in canonical_class_order(G) for _ in range(m[k])]
    if not parts:
        return trivial_lattice(G, 0)
    return direct_sum(parts)


@dataclass(frozen=True)
class Construction:
    lattice: Lattice
    multiplicities: list
    basis_change: fmpz_mat
    plain: Lattice

    def columns_for(self, keep) -> fmpz_mat:
        """Images under the scramble of the canonical blocks whose class passes ``keep``."""
        G = self.plain.group
        reps = classify_subgroups(G).class_reps
        cols = []
        pos = 0
        for k in canonical_class_order(G):
            size = G.order // reps[k].order
            for _ in range(self.multiplicities[k]):
                if keep(reps[k]):
                    cols.extend(range(pos, pos + size))
                pos += size
        # old basis vector e_i sits at P^-1 e_i in the scrambled coordinates
        Pinv = mx.fmpq_to_fmpz(flint.fmpq_mat(self.basis_change).inv())
        return mx.select_columns(Pinv, cols)


def random_permutation_construction(G: PGroup, seed: int, allowed: list[int] | None = None,
                                    max_rank: int = MAX_RANDOM_RANK) -> Construction:
    rng = random.Random(seed)
    m = random_multiplicities(G, rng, max_rank, allowed)
    plain = permutation_module(G, m)
    M, P = scramble(plain, seed)
    return Construction(M, m, P, plain)


def contains(K: Subgroup, N: Subgroup) -> bool:
    return all(x in K for x in N.elements)
