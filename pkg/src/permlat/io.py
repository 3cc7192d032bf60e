"""Versioned JSON documents for groups, lattices, certificates, presentations and reports.

Every document carries ``"schema": 1``.  Parsing errors raise SchemaError
with a JSON pointer to the offending node.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction

import flint

from . import _matrix as mx
from .decomp import PermutationCertificate, Verdict, canonical_class_order, class_label, verify_certificate
from .exceptions import InputError, SchemaError
from .hnn import HnnPresentation, RoundtripResult, make_presentation
from .lattice import Lattice, Sublattice
from .pgroup import PGroup, Subgroup, bundled_group, bundled_group_names, classify_subgroups, from_permutations

SCHEMA = 1


_FLAT_LIST = re.compile(r"\[\s*(-?\d+(?:,\s*-?\d+)*)\s*\]")


def dumps(doc) -> str:
    """Canonical text: sorted keys, two-space indent, integer lists on one line."""
    text = json.dumps(plain(doc), sort_keys=True, indent=2)
    return _FLAT_LIST.sub(lambda m: "[" + ", ".join(m.group(1).replace(",", " ").split()) + "]", text) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def plain(obj):
    """Convert library values to JSON-ready builtins."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(x) for x in obj]
    if isinstance(obj, flint.fmpz_mat):
        return mx.to_lists(obj)
    if isinstance(obj, flint.fmpz):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Subgroup):
        return list(obj.elements)
    if isinstance(obj, Sublattice):
        return sublattice_to_json(obj)
    if isinstance(obj, PermutationCertificate):
        return certificate_to_json(obj)
    if isinstance(obj, Verdict):
        return verdict_to_json(obj)
    return obj


# --------------------------------------------------------------------------
# field readers

def _field(doc, key, pointer, kind=None):
    if not isinstance(doc, dict):
        raise SchemaError(pointer, "expected an object")
    if key not in doc:
        raise SchemaError(f"{pointer}/{key}", "missing required field")
    val = doc[key]
    if kind is not None and not _is(val, kind):
        raise SchemaError(f"{pointer}/{key}", f"expected {kind.__name__}")
    return val


def _is(val, kind) -> bool:
    if kind is int:
        return isinstance(val, int) and not isinstance(val, bool)
    return isinstance(val, kind)


def _check_schema(doc, pointer=""):
    if isinstance(doc, dict) and "schema" in doc and doc["schema"] != SCHEMA:
        raise SchemaError(f"{pointer}/schema", f"unsupported schema version {doc['schema']!r}")


def _int_matrix(val, pointer, nrows=None, ncols=None) -> flint.fmpz_mat:
    if not isinstance(val, list):
        raise SchemaError(pointer, "expected a list of rows")
    if nrows is not None and len(val) != nrows:
        raise SchemaError(pointer, f"expected {nrows} rows, got {len(val)}")
    width = ncols
    for i, row in enumerate(val):
        if not isinstance(row, list):
            raise SchemaError(f"{pointer}/{i}", "expected a row list")
        if width is None:
            width = len(row)
        if len(row) != width:
            raise SchemaError(f"{pointer}/{i}", f"expected {width} entries, got {len(row)}")
        for j, x in enumerate(row):
            if not _is(x, int):
                raise SchemaError(f"{pointer}/{i}/{j}", "expected an integer")
    return flint.fmpz_mat(len(val), width or 0, [x for row in val for x in row]) if val else \
        flint.fmpz_mat(0, width or 0)


# --------------------------------------------------------------------------
# groups

def _cycles(perm) -> list[list[int]]:
    seen = set()
    out = []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = perm[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        out.append(cyc)
    return out


def group_to_json(G: PGroup) -> dict:
    if G.perms is not None:
        images = [G.perms[g] for g in G.generators]
        degree = len(G.perms[0])
    else:
        # left regular representation
        images = [tuple(G.mul[g][i] for i in range(G.order)) for g in G.generators]
        degree = G.order
    doc = {"schema": SCHEMA, "p": G.p, "degree": degree,
           "generators": [_cycles(im) for im in images], "names": list(G.generator_names)}
    if G.name:
        doc["name"] = G.name
    return doc


def group_from_json(doc, pointer: str = "") -> PGroup:
    _check_schema(doc, pointer)
    p = _field(doc, "p", pointer, int)
    degree = _field(doc, "degree", pointer, int)
    gens = _field(doc, "generators", pointer, list)
    if degree < 1:
        raise SchemaError(f"{pointer}/degree", "degree must be positive")
    for i, g in enumerate(gens):
        gp = f"{pointer}/generators/{i}"
        if not isinstance(g, list):
            raise SchemaError(gp, "expected a list of cycles")
        for j, cyc in enumerate(g):
            if not isinstance(cyc, list) or not all(_is(x, int) and 0 <= x < degree for x in cyc):
                raise SchemaError(f"{gp}/{j}", f"expected a cycle of points in 0..{degree - 1}")
    names = doc.get("names")
    if names is not None:
        if not (isinstance(names, list) and len(names) == len(gens) and all(isinstance(x, str) for x in names)):
            raise SchemaError(f"{pointer}/names", "expected one name per generator")
    try:
        return from_permutations(gens, degree, p=p, names=names, name=doc.get("name"))
    except InputError as exc:
        raise SchemaError(pointer or "/", str(exc)) from None


def resolve_group(ref, pointer: str, given: PGroup | None = None) -> PGroup:
    """A ``<group id>``: a bundled name, an inline group object, or the separately supplied group."""
    if isinstance(ref, dict):
        return group_from_json(ref, pointer)
    if isinstance(ref, str):
        if given is not None and ref in (given.name, "file"):
            return given
        if ref.lower() in bundled_group_names():
            G = bundled_group(ref)
            if given is not None and given is not G:
                raise SchemaError(pointer, f"names group {ref!r} but a different group was supplied")
            return G
        if given is not None:
            return given
        raise SchemaError(pointer, f"unknown group id {ref!r}")
    if ref is None and given is not None:
        return given
    raise SchemaError(pointer, "expected a group name or group object")


def group_id(G: PGroup):
    return G.name if G.name in bundled_group_names() else group_to_json(G)


# --------------------------------------------------------------------------
# lattices

def lattice_to_json(M: Lattice) -> dict:
    G = M.group
    mats = M.generator_matrices()
    return {"schema": SCHEMA, "group": group_id(G), "rank": M.rank,
            "action": {nm: mx.to_lists(mats[nm]) for nm in G.generator_names}}


def lattice_from_json(doc, group: PGroup | None = None, pointer: str = "") -> Lattice:
    _check_schema(doc, pointer)
    G = resolve_group(doc.get("group") if isinstance(doc, dict) else None, f"{pointer}/group", group)
    rank = _field(doc, "rank", pointer, int)
    action = _field(doc, "action", pointer, dict)
    if rank < 0:
        raise SchemaError(f"{pointer}/rank", "rank must be non-negative")
    mats = {}
    for nm in action:
        if nm not in G.generator_names:
            raise SchemaError(f"{pointer}/action/{nm}", f"unknown generator; expected one of {list(G.generator_names)}")
    for nm in G.generator_names:
        if nm not in action:
            raise SchemaError(f"{pointer}/action/{nm}", "missing generator matrix")
        mats[nm] = _int_matrix(action[nm], f"{pointer}/action/{nm}", rank, rank)
    try:
        return Lattice.from_generators(G, mats, name=doc.get("name"))
    except InputError as exc:
        raise SchemaError(f"{pointer}/action", str(exc)) from None


# --------------------------------------------------------------------------
# certificates and verdicts

def subgroup_table(G: PGroup) -> dict:
    reps = classify_subgroups(G).class_reps
    return {class_label(k): list(reps[k].elements) for k in canonical_class_order(G)}


def certificate_to_json(cert: PermutationCertificate) -> dict:
    return {"multiplicities": dict(cert.multiplicities), "basis": mx.to_lists(cert.change_of_basis),
            "subgroups": subgroup_table(cert.group)}


def certificate_from_json(doc, M: Lattice, pointer: str = "") -> PermutationCertificate:
    """Rebuild a certificate for ``M``; raises SchemaError when it does not verify."""
    G = M.group
    mult = _field(doc, "multiplicities", pointer, dict)
    labels = [class_label(k) for k in canonical_class_order(G)]
    for lab in mult:
        if lab not in labels:
            raise SchemaError(f"{pointer}/multiplicities/{lab}", "unknown subgroup class label")
        if not _is(mult[lab], int) or mult[lab] < 0:
            raise SchemaError(f"{pointer}/multiplicities/{lab}", "expected a non-negative integer")
    P = _int_matrix(_field(doc, "basis", pointer, list), f"{pointer}/basis", M.rank, M.rank)
    cert = PermutationCertificate(G, {lab: int(mult.get(lab, 0)) for lab in labels}, P)
    if not verify_certificate(M, cert):
        raise SchemaError(pointer or "/", "certificate does not verify against the lattice")
    return cert


def sublattice_to_json(S: Sublattice) -> dict:
    return {"rank": S.rank, "basis": [list(c) for c in mx.columns(S.basis)],
            "precision": S.precision}


def verdict_to_json(v: Verdict) -> dict:
    doc = {"verdict": "IsPermutation" if v.is_permutation else "NotPermutation", "method": v.method}
    if v.is_permutation:
        doc["certificate"] = certificate_to_json(v.certificate)
    else:
        doc["witness"] = sublattice_to_json(v.witness) if v.witness is not None else None
        doc["summand_ranks"] = list(v.summand_ranks)
    return doc


# --------------------------------------------------------------------------
# Weiss reports

def hypothesis_to_json(h) -> dict:
    doc = {"status": h.status, "reason": h.reason, "evidence": plain(h.evidence)}
    if h.certificate is not None:
        doc["certificate"] = certificate_to_json(h.certificate)
    return doc


def weiss_report_to_json(r) -> dict:
    doc = {"theorem": r.theorem, "hypothesis_i": hypothesis_to_json(r.hypothesis_i),
           "hypothesis_ii": hypothesis_to_json(r.hypothesis_ii),
           "conclusion": verdict_to_json(r.conclusion_check), "consistent": r.consistent,
           "hypotheses_hold": r.hypotheses_hold}
    if r.forced_rank is not None:
        doc["forced_rank"] = r.forced_rank
    if r.witness is not None:
        doc["trivial_part"] = {"provenance": r.witness.provenance, **sublattice_to_json(r.witness.basis)}
    return doc


def necessity_report_to_json(r) -> dict:
    return {"passed": r.passed, "hypothesis_i": hypothesis_to_json(r.hypothesis_i),
            "hypothesis_ii": hypothesis_to_json(r.hypothesis_ii), "trivial_part_rank": r.trivial_part_rank}


# --------------------------------------------------------------------------
# presentations

def presentation_to_json(pres: HnnPresentation) -> dict:
    return {"schema": SCHEMA, "base": group_id(pres.base),
            "edges": [{"subgroup": list(e.subgroup.elements), "multiplicity": e.multiplicity,
                       "label": e.label, "letters": list(e.letters)} for e in pres.edges],
            "relators": [[a, x] for a, x in pres.relators()]}


def presentation_from_json(doc, group: PGroup | None = None, pointer: str = "") -> HnnPresentation:
    _check_schema(doc, pointer)
    H = resolve_group(doc.get("base") if isinstance(doc, dict) else None, f"{pointer}/base", group)
    edges = _field(doc, "edges", pointer, list)
    pairs = []
    for i, e in enumerate(edges):
        ep = f"{pointer}/edges/{i}"
        elems = _field(e, "subgroup", ep, list)
        m = _field(e, "multiplicity", ep, int)
        if not all(_is(x, int) and 0 <= x < H.order for x in elems):
            raise SchemaError(f"{ep}/subgroup", f"expected element indices in 0..{H.order - 1}")
        if m < 1:
            raise SchemaError(f"{ep}/multiplicity", "multiplicity must be positive")
        try:
            K = H.subgroup(elems)
        except InputError as exc:
            raise SchemaError(f"{ep}/subgroup", str(exc)) from None
        pairs.append((K, m))
    try:
        return make_presentation(H, pairs)
    except InputError as exc:
        raise SchemaError(f"{pointer}/edges", str(exc)) from None


def roundtrip_to_json(r: RoundtripResult) -> dict:
    return {"ok": r.ok, "expected": r.expected, "recovered": r.recovered, "kernel_rank": r.kernel_rank}
