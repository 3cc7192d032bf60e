"""Acceptance suites shared by the ``selftest`` verb and the test suite.

Each suite returns a SuiteResult whose ``records`` are plain JSON values and
whose digest is independent of timings, so reruns can be compared byte for
byte.  Case functions take only names and seeds, which lets them run in
worker processes.
"""
from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import _matrix as mx
from .decomp import (PermutationCertificate, canonical_class_order, class_label, cp_split,
                     recognize_permutation, verify_certificate)
from .exceptions import NotPermutationOverC
from .fixtures import (contains, paper_example, permutation_module, random_multiplicities,
                       random_permutation_construction)
from .hnn import kernel_rank, roundtrip_check, synthesize_hnn
from .lattice import invariants, invariants_lattice, permutation_lattice, restrict, sign_lattice, sublattice
from .pgroup import (bundled_group, bundled_group_names, central_order_p_subgroups, classify_subgroups,
                     normal_subgroups)
from .weiss import TrivialPartCandidate, check_weiss_classic, check_weiss_generalized, necessity_check

import random

CASES = 100
HNN_CASES = 50
# seed offsets keep the suites' random streams apart
HNN_SEED_OFFSET = 100_000

LIMITS = {1: 1.0, 2: 60.0, 3: 60.0, 4: 60.0, 6: 60.0, 7: 10.0}
NAMES = {
    1: "paper-example-fidelity",
    2: "recognition-completeness",
    3: "generalized-weiss-soundness",
    4: "classical-weiss-soundness",
    5: "necessity",
    6: "hnn-roundtrip",
    7: "orbit-count-law",
    8: "negative-controls",
    9: "determinism",
}


@dataclass
class SuiteResult:
    number: int
    records: list
    failures: list
    seconds: float
    extra: dict = field(default_factory=dict)

    @property
    def name(self) -> str:
        return NAMES[self.number]

    @property
    def limit(self) -> float | None:
        return LIMITS.get(self.number)

    @property
    def within_limit(self) -> bool:
        return self.limit is None or self.seconds < self.limit

    @property
    def passed(self) -> bool:
        return not self.failures and bool(self.records) and self.within_limit

    @property
    def digest(self) -> str:
        text = json.dumps(self.records, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lim = f", limit {self.limit:g} s" if self.limit is not None else ""
        why = ""
        if self.failures:
            why = f"; {len(self.failures)} failing, first: {self.failures[0]}"
        elif not self.within_limit:
            why = "; over the time limit"
        return f"[{status}] criterion {self.number} {self.name}: {len(self.records)} cases, " \
               f"{self.seconds:.2f} s{lim}{why}"

    def summary(self, timings: bool = False) -> dict:
        doc = {"criterion": self.number, "name": self.name, "passed": not self.failures and bool(self.records),
               "cases": len(self.records), "failures": self.failures[:5], "digest": self.digest}
        if timings:
            doc["seconds"] = round(self.seconds, 3)
            doc["within_limit"] = self.within_limit
        return doc


def _run_cases(fn, cases, workers: int):
    if workers > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, cases, chunksize=max(1, len(cases) // (4 * workers))))
    return [fn(c) for c in cases]


def _suite(number: int, fn, cases, workers: int) -> SuiteResult:
    t0 = time.perf_counter()
    records = _run_cases(fn, cases, workers)
    dt = time.perf_counter() - t0
    failures = [r["case"] for r in records if not r["ok"]]
    return SuiteResult(number, records, failures, dt)


def _labels(m: list[int], G) -> dict:
    return {class_label(k): m[k] for k in canonical_class_order(G)}


def _basis_digest(P) -> str:
    return hashlib.sha256(repr(mx.to_lists(P)).encode()).hexdigest()[:16]


# --------------------------------------------------------------------------
# 1. the worked example

def suite_paper_example(workers: int = 1) -> SuiteResult:
    def case(_):
        M = paper_example()
        G = M.group
        N = G.generated_subgroup([G.generators[G.generator_names.index("c1")]])
        R = restrict(M, N)
        vr = recognize_permutation(R)
        # over N = C2: K0 is the trivial subgroup, K1 is N itself
        restr = vr.certificate.nonzero() if vr.is_permutation else None
        L = invariants_lattice(M, N)
        vi = recognize_permutation(L)
        inv = vi.certificate.nonzero() if vi.is_permutation else None
        v = recognize_permutation(M)
        ok = (restr == {"K1": 1, "K0": 1} and inv == {"K0": 1} and L.group.order == 2
              and not v.is_permutation and v.witness is not None)
        return {"case": "paper-example", "ok": ok, "restriction": restr, "invariants": inv,
                "invariants_group_order": L.group.order,
                "verdict": "IsPermutation" if v.is_permutation else "NotPermutation",
                "witness_rank": v.witness.rank if v.witness is not None else None}
    return _suite(1, case, [None], 1)


# --------------------------------------------------------------------------
# 2. recognition of scrambled permutation lattices

def recognition_case(arg) -> dict:
    gname, seed = arg
    G = bundled_group(gname)
    c = random_permutation_construction(G, seed)
    v = recognize_permutation(c.lattice, seed=seed)
    want = _labels(c.multiplicities, G)
    got = dict(v.certificate.multiplicities) if v.is_permutation else None
    verified = bool(v.is_permutation and verify_certificate(c.lattice, v.certificate))
    return {"case": f"{gname}/{seed}", "ok": got == want and verified, "rank": c.lattice.rank,
            "expected": want, "recovered": got, "method": v.method,
            "basis": _basis_digest(v.certificate.change_of_basis) if v.is_permutation else None}


def suite_recognition(cases: int = CASES, workers: int = 1) -> SuiteResult:
    return _suite(2, recognition_case, [(g, s) for g in bundled_group_names() for s in range(cases)], workers)


# --------------------------------------------------------------------------
# 3. generalized Weiss on constructions with |N| = p

def generalized_construction(gname: str, seed: int):
    G = bundled_group(gname)
    Ns = central_order_p_subgroups(G)
    N = Ns[seed % len(Ns)]
    c = random_permutation_construction(G, seed)
    W = c.columns_for(lambda K: contains(K, N))
    return G, N, c, W


def generalized_case(arg) -> dict:
    gname, seed = arg
    G, N, c, W = generalized_construction(gname, seed)
    cand = TrivialPartCandidate(sublattice(c.lattice, W), "construction")
    r = check_weiss_generalized(c.lattice, N, candidate=cand, seed=seed)
    ok = (r.hypothesis_i.holds and r.hypothesis_ii.holds and r.conclusion_check.is_permutation
          and r.consistent)
    return {"case": f"{gname}/{seed}", "ok": ok, "N": list(N.elements), "rank": c.lattice.rank,
            "forced_rank": r.forced_rank, "h1": r.hypothesis_i.status, "h2": r.hypothesis_ii.status,
            "consistent": r.consistent,
            "conclusion": dict(r.conclusion_check.certificate.multiplicities)
            if r.conclusion_check.is_permutation else None}


def suite_generalized_weiss(cases: int = CASES, workers: int = 1) -> SuiteResult:
    return _suite(3, generalized_case, [(g, s) for g in bundled_group_names() for s in range(cases)], workers)


# --------------------------------------------------------------------------
# 4. classical Weiss, N of any order

def classic_construction(gname: str, seed: int):
    G = bundled_group(gname)
    Ns = [N for N in normal_subgroups(G) if N.order > 1]
    N = Ns[seed % len(Ns)]
    reps = classify_subgroups(G).class_reps
    # K meets N trivially iff all its conjugates do, N being normal
    allowed = [k for k, K in enumerate(reps) if set(K.elements) & set(N.elements) == {0}]
    c = random_permutation_construction(G, seed, allowed=allowed)
    return G, N, c


def classic_case(arg) -> dict:
    gname, seed = arg
    G, N, c = classic_construction(gname, seed)
    r = check_weiss_classic(c.lattice, N, seed=seed)
    ok = (r.hypothesis_i.holds and r.hypothesis_ii.holds and r.conclusion_check.is_permutation
          and r.consistent)
    return {"case": f"{gname}/{seed}", "ok": ok, "N": list(N.elements), "rank": c.lattice.rank,
            "h1": r.hypothesis_i.status, "h2": r.hypothesis_ii.status, "consistent": r.consistent,
            "conclusion": dict(r.conclusion_check.certificate.multiplicities)
            if r.conclusion_check.is_permutation else None}


def suite_classic_weiss(cases: int = CASES, workers: int = 1) -> SuiteResult:
    return _suite(4, classic_case, [(g, s) for g in bundled_group_names() for s in range(cases)], workers)


# --------------------------------------------------------------------------
# 5. necessity for every permutation verdict of suites 2-4

def _necessity_all(M, verdict, seed) -> list[dict]:
    """Run the check for every central subgroup of order p of the lattice's group."""
    out = []
    for N in central_order_p_subgroups(M.group):
        r = necessity_check(M, N, seed=seed, verdict=verdict)
        out.append({"N": list(N.elements), "passed": r.passed, "trivial_part_rank": r.trivial_part_rank})
    return out


def _with_fixed_points(M, verdict, seed) -> list[dict]:
    """Necessity for ``M`` and for every permutation lattice ``M^N`` met while checking it."""
    out = [{"lattice": "M", "checks": _necessity_all(M, verdict, seed)}]
    for N in central_order_p_subgroups(M.group):
        L = invariants_lattice(M, N)
        if L.group.order == 1 or L.rank == 0:
            continue
        vl = recognize_permutation(L, seed=seed)
        if vl.is_permutation:
            out.append({"lattice": f"M^{list(N.elements)}", "checks": _necessity_all(L, vl, seed)})
    return out


def necessity_case(arg) -> dict:
    suite, gname, seed = arg
    if suite == 2:
        M = random_permutation_construction(bundled_group(gname), seed).lattice
    elif suite == 3:
        M = generalized_construction(gname, seed)[2].lattice
    else:
        M = classic_construction(gname, seed)[2].lattice
    v = recognize_permutation(M, seed=seed)
    if not v.is_permutation:
        return {"case": f"{suite}:{gname}/{seed}", "ok": True, "checks": []}
    checks = _with_fixed_points(M, v, seed)
    ok = all(c["passed"] for block in checks for c in block["checks"])
    return {"case": f"{suite}:{gname}/{seed}", "ok": ok, "checks": checks}


def suite_necessity(cases: int = CASES, workers: int = 1) -> SuiteResult:
    todo = [(s, g, k) for s in (2, 3, 4) for g in bundled_group_names() for k in range(cases)]
    return _suite(5, necessity_case, todo, workers)


# --------------------------------------------------------------------------
# 6. HNN roundtrip

def hnn_case(arg) -> dict:
    gname, seed = arg
    G = bundled_group(gname)
    m = random_multiplicities(G, random.Random(HNN_SEED_OFFSET + seed))
    plain = permutation_module(G, m)
    cert = PermutationCertificate(G, _labels(m, G), mx.identity(plain.rank))
    assert verify_certificate(plain, cert)
    r = roundtrip_check(cert, G, seed=seed)
    pres = synthesize_hnn(cert, G)
    reps = classify_subgroups(G).class_reps
    law = sum(m[k] * (G.order // reps[k].order) for k in range(len(m)))
    ok = r.ok and r.kernel_rank == law == kernel_rank(pres)
    return {"case": f"{gname}/{seed}", "ok": ok, "expected": r.expected, "recovered": r.recovered,
            "kernel_rank": r.kernel_rank, "rank_law": law}


def suite_hnn(cases: int = HNN_CASES, workers: int = 1) -> SuiteResult:
    return _suite(6, hnn_case, [(g, s) for g in bundled_group_names() for s in range(cases)], workers)


# --------------------------------------------------------------------------
# 7. orbit counts

def _brute_orbits(G, K, L) -> int:
    cosets = {frozenset(G.mul[g][l] for l in L.elements) for g in range(G.order)}
    seen = set()
    count = 0
    for c in cosets:
        if c in seen:
            continue
        count += 1
        g = min(c)
        for k in K.elements:
            seen.add(frozenset(G.mul[G.mul[k][g]][l] for l in L.elements))
    return count


def orbit_case(gname) -> dict:
    G = bundled_group(gname)
    subs = classify_subgroups(G).all_subgroups
    bad = []
    for i, L in enumerate(subs):
        P = permutation_lattice(G, L)
        for j, K in enumerate(subs):
            if invariants(P, K).rank != _brute_orbits(G, K, L):
                bad.append([j, i])
    return {"case": gname, "ok": not bad, "pairs": len(subs) ** 2, "mismatches": bad}


def suite_orbit_count(workers: int = 1) -> SuiteResult:
    return _suite(7, orbit_case, bundled_group_names(), workers)


# --------------------------------------------------------------------------
# 8. negative controls

def suite_negative_controls(workers: int = 1) -> SuiteResult:
    def case(name):
        if name == "cp-split-sign-c2":
            S = sign_lattice(bundled_group("c2"))
            try:
                cp_split(S, S.group.whole())
                return {"case": name, "ok": False, "outcome": "split"}
            except NotPermutationOverC:
                return {"case": name, "ok": True, "outcome": "NotPermutationOverC"}
        M = sign_lattice(bundled_group("c2")) if name == "sign-c2" else paper_example()
        v = recognize_permutation(M)
        w = v.witness
        ok = (not v.is_permutation and w is not None and w.rank > 0 and w.basis.nrows() == M.rank)
        return {"case": name, "ok": ok, "verdict": "IsPermutation" if v.is_permutation else "NotPermutation",
                "witness": mx.columns(w.basis) if w is not None else None}
    return _suite(8, case, ["sign-c2", "paper-example", "cp-split-sign-c2"], 1)


# --------------------------------------------------------------------------

def run_suites(numbers=range(1, 9), cases: int = CASES, hnn_cases: int = HNN_CASES,
               workers: int = 1) -> dict[int, SuiteResult]:
    table = {
        1: lambda: suite_paper_example(),
        2: lambda: suite_recognition(cases, workers),
        3: lambda: suite_generalized_weiss(cases, workers),
        4: lambda: suite_classic_weiss(cases, workers),
        5: lambda: suite_necessity(cases, workers),
        6: lambda: suite_hnn(hnn_cases, workers),
        7: lambda: suite_orbit_count(workers),
        8: lambda: suite_negative_controls(),
    }
    return {n: table[n]() for n in numbers}


def suite_determinism(first: dict[int, SuiteResult], cases: int = CASES, hnn_cases: int = HNN_CASES,
                      workers: int = 1) -> SuiteResult:
    """Rerun suites 1-8 and compare record digests with ``first``."""
    t0 = time.perf_counter()
    again = run_suites(sorted(first), cases, hnn_cases, workers)
    records = [{"case": f"suite-{n}", "ok": first[n].digest == again[n].digest,
                "digest": first[n].digest} for n in sorted(first)]
    failures = [r["case"] for r in records if not r["ok"]]
    return SuiteResult(9, records, failures, time.perf_counter() - t0)


def selftest(cases: int = CASES, hnn_cases: int = HNN_CASES, workers: int = 1,
             determinism: bool = True) -> list[SuiteResult]:
    res = run_suites(range(1, 9), cases, hnn_cases, workers)
    out = [res[n] for n in sorted(res)]
    if determinism:
        out.append(suite_determinism(res, cases, hnn_cases, workers))
    return out
