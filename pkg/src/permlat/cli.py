"""Batch command-line front end; one JSON report per invocation.

Exit codes: 0 a verdict was computed, 1 input error, 2 precision exhausted
or inconclusive search, 3 selftest failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time

from . import __version__
from . import io as jio
from .decomp import (METHODS, PermutationCertificate, canonical_class_order, class_label, cp_split,
                     recognize_permutation, verify_certificate)
from .exceptions import (CandidateInvalid, InputError, NotPermutationOverC, PrecisionExhausted,
                         PreconditionFailed, SchemaError, SearchInconclusive)
from .fixtures import fixture, fixture_names, permutation_module
from .hnn import (kernel_abelianization, kernel_rank, quotient_kill_nontrivial_edges, roundtrip_check,
                  synthesize_hnn)
from .lattice import sublattice
from .pgroup import central_order_p_subgroups, classify_subgroups
from .validation import check_context, parse_subgroup
from .weiss import check_weiss_classic, check_weiss_generalized, necessity_check
from . import _matrix as mx

log = logging.getLogger("permlat")

COMMANDS = ("recognize", "cp-split", "weiss-classic", "weiss-generalized", "necessity",
            "hnn-synthesize", "hnn-roundtrip", "subgroups", "selftest")

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_SELFTEST = 0, 1, 2, 3


class Inconclusive(Exception):
    """Carries a partial result out of a handler."""

    def __init__(self, message: str, result: dict):
        super().__init__(message)
        self.result = result


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="permlat", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--p", type=int, default=None, help="prime; must match the group")
    ap.add_argument("--cap", type=int, default=64, help="initial p-adic precision cap")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--fixture", help=f"one of: {', '.join(fixture_names())}")
    ap.add_argument("--group", metavar="FILE", help="group JSON")
    ap.add_argument("--lattice", metavar="FILE", help="lattice JSON")
    ap.add_argument("--presentation", metavar="FILE", help="HNN presentation JSON")
    ap.add_argument("--candidate", metavar="FILE", help="trivial-part candidate JSON for weiss-generalized")
    ap.add_argument("--subgroup", help="N or C: 'center', generator names or element indices, comma-separated")
    ap.add_argument("--method", choices=METHODS, default="auto")
    ap.add_argument("--out", metavar="FILE", help="write the report here instead of standard output")
    ap.add_argument("--timings", action="store_true", help="add wall-clock timings (breaks byte-identity)")
    ap.add_argument("--cases", type=int, default=100, help="selftest: seeds per group")
    ap.add_argument("--hnn-cases", type=int, default=50, help="selftest: HNN seeds per group")
    ap.add_argument("--workers", type=int, default=1, help="selftest: worker processes")
    ap.add_argument("--no-determinism", action="store_true", help="selftest: skip the rerun comparison")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


# --------------------------------------------------------------------------
# inputs

class Inputs:
    def __init__(self, args):
        self.fixture = None
        self.group = None
        self.lattice = None
        self.presentation = None
        if args.fixture and (args.group or args.lattice):
            raise InputError("give either --fixture or --group/--lattice files, not both")
        if args.fixture:
            self.fixture = fixture(args.fixture)
            self.group = self.fixture.group
            self.lattice = self.fixture.lattice
        if args.group:
            self.group = jio.group_from_json(jio.load(args.group))
        if args.lattice:
            self.lattice = jio.lattice_from_json(jio.load(args.lattice), self.group)
            self.group = self.lattice.group
        if args.presentation:
            self.presentation = jio.presentation_from_json(jio.load(args.presentation), self.group)
            self.group = self.presentation.base
        if self.group is not None:
            self.ctx = check_context(self.group, args.p, args.cap)

    def need_group(self):
        if self.group is None:
            raise InputError("this command needs a group: --fixture, --group, --lattice or --presentation")
        return self.group

    def need_lattice(self):
        if self.lattice is None:
            raise InputError("this command needs a lattice: --fixture NAME or --lattice FILE")
        return self.lattice

    def subgroup(self, spec, order_p: bool):
        G = self.need_group()
        if spec is not None:
            return parse_subgroup(G, spec)
        if self.fixture is not None and self.fixture.default_subgroup:
            return parse_subgroup(G, ",".join(self.fixture.default_subgroup))
        if order_p:
            cands = central_order_p_subgroups(G)
            if not cands:
                raise InputError("group has no central subgroup of order p; pass --subgroup")
            return cands[0]
        return parse_subgroup(G, "center")


def _echo(args) -> dict:
    inputs = {k: getattr(args, k) for k in ("fixture", "group", "lattice", "presentation", "candidate", "subgroup")
              if getattr(args, k) is not None}
    return {"command": args.command, "inputs": inputs,
            "options": {"p": args.p, "cap": args.cap, "seed": args.seed, "method": args.method}}


def _group_summary(G) -> dict:
    return {"name": G.name, "order": G.order, "p": G.p, "generators": list(G.generator_names)}


# --------------------------------------------------------------------------
# handlers; each returns the "result" block

def cmd_recognize(args, inp: Inputs) -> dict:
    M = inp.need_lattice()
    v = recognize_permutation(M, inp.ctx, seed=args.seed, method=args.method)
    doc = jio.verdict_to_json(v)
    doc["rank"] = M.rank
    if v.is_permutation:
        doc["verified"] = verify_certificate(M, v.certificate)
    return doc


def cmd_cp_split(args, inp: Inputs) -> dict:
    M = inp.need_lattice()
    C = inp.subgroup(args.subgroup, order_p=True)
    try:
        s = cp_split(M, C, inp.ctx, seed=args.seed)
    except NotPermutationOverC as exc:
        return {"verdict": "NotPermutationOverC", "reason": str(exc), "C": list(C.elements)}
    return {"verdict": "split", "C": list(C.elements), "M1": jio.sublattice_to_json(s.M1),
            "Mp": jio.sublattice_to_json(s.Mp), "restriction_certificate": jio.certificate_to_json(s.certificate)}


def cmd_weiss_classic(args, inp: Inputs) -> dict:
    M = inp.need_lattice()
    N = inp.subgroup(args.subgroup, order_p=False)
    doc = jio.weiss_report_to_json(check_weiss_classic(M, N, inp.ctx, seed=args.seed))
    doc["N"] = list(N.elements)
    return doc


def cmd_weiss_generalized(args, inp: Inputs) -> dict:
    M = inp.need_lattice()
    N = inp.subgroup(args.subgroup, order_p=True)
    cand = None
    if args.candidate:
        doc = jio.load(args.candidate)
        basis = jio._field(doc, "basis", "", list)
        cols = jio._int_matrix(basis, "/basis", ncols=M.rank) if basis else mx.zeros(0, M.rank)
        cand = sublattice(M, cols.transpose(), inp.ctx)
    try:
        r = check_weiss_generalized(M, N, cand, inp.ctx, seed=args.seed, raise_inconclusive=True)
    except SearchInconclusive as exc:
        doc = jio.weiss_report_to_json(exc.report)
        doc["N"] = list(N.elements)
        raise Inconclusive(str(exc), doc) from None
    doc = jio.weiss_report_to_json(r)
    doc["N"] = list(N.elements)
    return doc


def cmd_necessity(args, inp: Inputs) -> dict:
    M = inp.need_lattice()
    N = inp.subgroup(args.subgroup, order_p=True)
    doc = jio.necessity_report_to_json(necessity_check(M, N, inp.ctx, seed=args.seed))
    doc["N"] = list(N.elements)
    return doc


def _certificate_from_inputs(args, inp: Inputs):
    """From a presentation (canonical certificate) or by recognizing the lattice."""
    if inp.presentation is not None:
        H = inp.presentation.base
        cls = classify_subgroups(H)
        m = [0] * len(cls.class_reps)
        for e in inp.presentation.edges:
            m[cls.rep_index(e.subgroup)] = e.multiplicity
        plain = permutation_module(H, m)
        labels = {class_label(k): m[k] for k in canonical_class_order(H)}
        return PermutationCertificate(H, labels, mx.identity(plain.rank))
    M = inp.need_lattice()
    v = recognize_permutation(M, inp.ctx, seed=args.seed, method=args.method)
    if not v.is_permutation:
        raise PreconditionFailed("lattice is not a permutation lattice; no HNN presentation exists")
    return v.certificate


def cmd_hnn_synthesize(args, inp: Inputs) -> dict:
    cert = _certificate_from_inputs(args, inp)
    H = cert.group
    pres = inp.presentation if inp.presentation is not None else synthesize_hnn(cert, H)
    ab = kernel_abelianization(pres, inp.ctx)
    fp = quotient_kill_nontrivial_edges(pres)
    return {"presentation": jio.presentation_to_json(pres), "kernel_rank": kernel_rank(pres),
            "kernel_abelianization": jio.lattice_to_json(ab),
            "free_product_quotient": {"finite_factor": jio.group_id(fp.finite_factor), "free_rank": fp.free_rank},
            "certificate": jio.certificate_to_json(cert)}


def cmd_hnn_roundtrip(args, inp: Inputs) -> dict:
    cert = _certificate_from_inputs(args, inp)
    r = roundtrip_check(cert, cert.group, inp.ctx, seed=args.seed)
    return {"roundtrip": r.ok, **jio.roundtrip_to_json(r)}


def cmd_subgroups(args, inp: Inputs) -> dict:
    G = inp.need_group()
    cls = classify_subgroups(G)
    out = []
    for k in canonical_class_order(G):
        K = cls.class_reps[k]
        out.append({"label": class_label(k), "order": K.order, "index": G.order // K.order,
                    "elements": list(K.elements), "normal": K.is_normal, "class_size": cls.class_sizes[k],
                    "generators": list(G.subgroup_generators(K))})
    return {"group": jio.group_to_json(G), "classes": out, "subgroup_count": len(cls.all_subgroups)}


def cmd_selftest(args, inp: Inputs) -> dict:
    from .selftest import selftest
    results = selftest(args.cases, args.hnn_cases, args.workers, determinism=not args.no_determinism)
    for r in results:
        log.info(r.line())
    summaries = [r.summary(args.timings) for r in results]
    return {"criteria": summaries, "passed": all(s["passed"] for s in summaries)}


HANDLERS = {
    "recognize": cmd_recognize, "cp-split": cmd_cp_split, "weiss-classic": cmd_weiss_classic,
    "weiss-generalized": cmd_weiss_generalized, "necessity": cmd_necessity,
    "hnn-synthesize": cmd_hnn_synthesize, "hnn-roundtrip": cmd_hnn_roundtrip,
    "subgroups": cmd_subgroups, "selftest": cmd_selftest,
}


# --------------------------------------------------------------------------

def run(args: argparse.Namespace) -> tuple[int, dict]:
    """Dispatch parsed arguments; returns ``(exit_code, report)``."""
    logging.basicConfig(level=logging.INFO if args.verbose or args.command == "selftest" else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    report = {"schema": jio.SCHEMA, "tool": {"name": "permlat", "version": __version__}, **_echo(args)}
    t0 = time.perf_counter()
    code = EXIT_OK
    try:
        inp = Inputs(args)
        if inp.group is not None:
            report["group"] = _group_summary(inp.group)
        report["result"] = HANDLERS[args.command](args, inp)
        report["status"] = "ok"
        if args.command == "selftest" and not report["result"]["passed"]:
            report["status"] = "selftest-failed"
            code = EXIT_SELFTEST
    except Inconclusive as exc:
        report["status"] = "inconclusive"
        report["result"] = exc.result
        report["diagnostic"] = str(exc)
        code = EXIT_INCONCLUSIVE
    except (PrecisionExhausted, SearchInconclusive) as exc:
        report["status"] = "precision-exhausted" if isinstance(exc, PrecisionExhausted) else "inconclusive"
        report["diagnostic"] = str(exc)
        code = EXIT_INCONCLUSIVE
    except (InputError, CandidateInvalid, PreconditionFailed) as exc:
        report["status"] = "input-error"
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, SchemaError):
            report["error"]["pointer"] = exc.pointer
        code = EXIT_INPUT
    if args.timings:
        report["timings"] = {"total_seconds": round(time.perf_counter() - t0, 3)}
    if code:
        log.error("%s: %s", report["status"], report.get("diagnostic") or report.get("error", {}).get("message"))
    return code, report


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse usage errors are input errors
        return EXIT_INPUT if exc.code else EXIT_OK
    code, report = run(args)
    text = jio.dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
