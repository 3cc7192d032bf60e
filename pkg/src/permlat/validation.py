"""Argument checks shared by the estimator facade and the command line."""
from __future__ import annotations

from .exceptions import InputError
from .lattice import Lattice
from .padic_linalg import PrecisionContext
from .pgroup import PGroup, Subgroup, center


def check_lattice(M, what: str = "lattice") -> Lattice:
    if not isinstance(M, Lattice):
        raise InputError(f"{what} must be a Lattice, got {type(M).__name__}")
    return M


def check_context(G: PGroup, p: int | None = None, cap: int = 64) -> PrecisionContext:
    """Precision context for ``G``; an explicit prime must match the group's."""
    if p is not None and int(p) != G.p:
        raise InputError(f"prime {p} does not match the group's prime {G.p}")
    if isinstance(cap, bool) or not isinstance(cap, int):
        raise InputError("precision cap must be an integer")
    return PrecisionContext(G.p, cap)


def check_seed(seed) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise InputError("seed must be a non-negative integer")
    return seed


def parse_subgroup(G: PGroup, spec) -> Subgroup:
    """Accept a Subgroup, element indices, or text.

    Text is ``center``, or comma-separated generator names or element
    indices; the subgroup generated by them is returned.
    """
    if isinstance(spec, Subgroup):
        return G.as_subgroup(spec)
    if isinstance(spec, str):
        text = spec.strip()
        if text == "center":
            return center(G)
        if not text:
            return G.trivial_subgroup()
        elems = []
        for tok in (t.strip() for t in text.split(",")):
            if tok in G.generator_names:
                elems.append(G.generators[G.generator_names.index(tok)])
            elif tok.isdigit() and int(tok) < G.order:
                elems.append(int(tok))
            else:
                raise InputError(f"{tok!r} is neither a generator name of {list(G.generator_names)} "
                                 f"nor an element index below {G.order}")
        return G.generated_subgroup(elems)
    try:
        elems = [int(x) for x in spec]
    except (TypeError, ValueError):
        raise InputError("subgroup must be a Subgroup, element indices or a generator list") from None
    return G.subgroup(elems)
