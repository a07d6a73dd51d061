"""Command line entry point.

Builds and caches algebras and representations, runs the verification
suites, and emits JSON reports.  All rational literals use "p/q" with
comma-separated vectors; floats are rejected.  Exit code 0 means every
check passed (probe verdicts FULL and PROPER both count as successful
runs; INCONCLUSIVE exits nonzero).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from math import comb

from .linalg import format_scalar, parse_scalar
from .symplectic import build_sp, rank_one, sp_decompose
from .reps import (
    build_rep,
    contraction_theta,
    rep_from_obj,
    verify_intertwiner,
)
from .hamiltonian import (
    GradedVector,
    ModuleParams,
    verify_g1,
    verify_g2_table,
    verify_ham_bracket,
    verify_named_actions,
    verify_shift_isomorphism,
)
from .submodules import (
    Box,
    GeneratorSet,
    build_submodule,
    claim1_inequality,
    claim2_witness,
    invariance_check,
    irreducibility_probe,
)

DEFAULT_SEED = 0xC0FFEE

CHECKS = {
    "sp-check": "basis brackets close in the sp span; symplectic condition; r rbar^t membership",
    "rep-build": "representation construction and exact JSON round trip",
    "theta-check": "the contraction theta_k intertwines the sp action",
    "dim-check": "dim Ker theta_k = C(2n,k) - C(2n,k-2)",
    "ham-bracket": "[H_r, H_s] = (rbar, s) H_{r+s} on random graded vectors",
    "g1-check": "g1 quadratic expansion matches the sp-basis table and the module action",
    "g2-table": "degree-4 coefficients of g2 match the closed six-row table",
    "named-actions": "closed forms of the three distinguished generator actions",
    "shift-iso": "grade shift by an integer vector intertwines shifted parameters",
    "submodule-check": "the explicit graded family is invariant under all modeled generators",
    "claim2-witness": "a nonzero wedge witness in W_r^k intersected with Ker theta_k",
    "claim1-ineq": "integer sweep of C(2n,k) - C(2n,k-2) > C(2n-1,k-1)",
    "probe": "closure-based irreducibility probe on a truncation box",
}


def _parse_vector(text: str, length: int, what: str) -> tuple:
    parts = text.split(",")
    if len(parts) != length:
        raise ValueError(f"{what} must have {length} comma-separated entries, got {len(parts)}")
    return tuple(parse_scalar(tok.strip()) for tok in parts)


def _parse_int_vector(text: str, length: int, what: str) -> tuple:
    vec = _parse_vector(text, length, what)
    if any(x.denominator != 1 for x in vec):
        raise ValueError(f"{what} must be an integer vector")
    return tuple(int(x) for x in vec)


def _resolve_rep(alg, spec: str):
    if spec.startswith("file:"):
        path = spec[len("file:"):]
        with open(path, "r", encoding="utf-8") as fh:
            return rep_from_obj(json.load(fh))
    cache_dir = os.environ.get("HAMLIE_CACHE_DIR")
    cache_path = None
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        name = f"rep_n{alg.n}_{spec.replace(':', '_')}.json"
        cache_path = os.path.join(cache_dir, name)
        if os.path.exists(cache_path):
            with open(cache_path, "r", encoding="utf-8") as fh:
                return rep_from_obj(json.load(fh))
    rep = build_rep(alg, spec)
    if cache_path:
        with open(cache_path, "w", encoding="utf-8") as fh:
            json.dump(rep.to_obj(), fh, sort_keys=True, indent=2)
    return rep


def _module_params(args, alg):
    N = alg.N
    alpha = _parse_vector(args.alpha, N, "--alpha") if args.alpha else (Fraction(0),) * N
    beta = _parse_vector(args.beta, N, "--beta") if args.beta else (Fraction(0),) * N
    rep = _resolve_rep(alg, args.rep)
    return ModuleParams(alpha, beta, rep)


def _report_ok(report: dict) -> bool:
    if "verdict" in report:
        return report["verdict"] in ("FULL", "PROPER")
    return not report.get("failures")


def _emit(report: dict, args) -> int:
    text = json.dumps(report, sort_keys=True, indent=2)
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    ok = _report_ok(report)
    check = report.get("check", "report")
    if "verdict" in report:
        print(f"[{check}] verdict={report['verdict']}")
        if report.get("caveat"):
            print(f"  note: {report['caveat']}")
    elif "samples" in report:
        print(f"[{check}] samples={report['samples']} passes={report['passes']} "
              f"failures={len(report['failures'])}")
    elif "pairs" in report:
        print(f"[{check}] method={report.get('method')} pairs={report['pairs']} "
              f"passes={report['passes']} failures={len(report['failures'])}")
    else:
        print(f"[{check}] {'ok' if ok else 'FAILED'}")
    for f in report.get("failures", [])[:5]:
        print(f"  failure: {f}")
    if not ok:
        print(f"[{check}] FAILED")
    return 0 if ok else 1


# -- subcommand handlers ---------------------------------------------------


def _cmd_sp_check(args) -> int:
    alg = build_sp(args.n, verify=True)
    rng = random.Random(args.seed)
    failures = []
    for _ in range(args.samples):
        r = tuple(rng.randint(-5, 5) for _ in range(alg.N))
        try:
            sp_decompose(rank_one(r), alg)
        except ValueError:
            failures.append({"r": list(r)})
    report = {
        "check": "sp_structure",
        "params": {"n": args.n, "rng_seed": args.seed},
        "dim": alg.dim,
        "samples": args.samples,
        "passes": args.samples - len(failures),
        "failures": failures,
    }
    return _emit(report, args)


def _cmd_rep_build(args) -> int:
    alg = build_sp(args.n, verify=False)
    rep = _resolve_rep(alg, args.rep)
    round_trip = rep_from_obj(rep.to_obj())
    failures = [] if round_trip == rep else [{"kind": "round_trip"}]
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            json.dump(rep.to_obj(), fh, sort_keys=True, indent=2)
            fh.write("\n")
    report = {
        "check": "rep_build",
        "params": {"n": args.n, "rep": rep.name},
        "dim": rep.dim,
        "samples": 1,
        "passes": 1 - len(failures),
        "failures": failures,
    }
    text = json.dumps(report, sort_keys=True, indent=2)
    ok = not failures
    print(f"[rep_build] name={rep.name} dim={rep.dim} round_trip={'ok' if ok else 'FAILED'}")
    del text
    return 0 if ok else 1


def _cmd_theta_check(args) -> int:
    alg = build_sp(args.n, verify=False)
    theta = contraction_theta(alg, args.k)
    ok, violations = verify_intertwiner(theta)
    report = {
        "check": "theta_equivariance",
        "params": {"n": args.n, "k": args.k},
        "samples": len(alg.labels),
        "passes": len(alg.labels) - len(violations),
        "failures": [{"label": label} for label in violations],
    }
    return _emit(report, args)


def _cmd_dim_check(args) -> int:
    alg = build_sp(args.n, verify=False)
    theta = contraction_theta(alg, args.k)
    from .linalg import nullspace

    got = nullspace(theta.matrix).dim
    want = comb(alg.N, args.k) - comb(alg.N, args.k - 2)
    failures = [] if got == want else [{"got": got, "want": want}]
    report = {
        "check": "kernel_dimension",
        "params": {"n": args.n, "k": args.k},
        "samples": 1,
        "passes": 1 - len(failures),
        "failures": failures,
        "dim": got,
    }
    return _emit(report, args)


def _cmd_ham_bracket(args) -> int:
    alg = build_sp(args.n, verify=False)
    p = _module_params(args, alg)
    rng = random.Random(args.seed)
    N, dim = alg.N, p.rep.dim
    failures = []
    skipped = 0
    for _ in range(args.samples):
        r = tuple(rng.randint(-3, 3) for _ in range(N))
        s = tuple(rng.randint(-3, 3) for _ in range(N))
        grade = tuple(rng.randint(-3, 3) for _ in range(N))
        payload = tuple(Fraction(rng.randint(-5, 5)) for _ in range(dim))
        x = GradedVector(grade, payload)
        res = verify_ham_bracket(r, s, x, p)
        if res is None:
            skipped += 1
        elif not res:
            failures.append({"r": list(r), "s": list(s), "grade": list(grade)})
    report = {
        "check": "ham_bracket",
        "params": {
            "n": args.n,
            "rep": p.rep.name,
            "alpha": [format_scalar(a) for a in p.alpha],
            "rng_seed": args.seed,
        },
        "samples": args.samples,
        "skipped": skipped,
        "passes": args.samples - skipped - len(failures),
        "failures": failures,
    }
    return _emit(report, args)


def _cmd_g1_check(args) -> int:
    alg = build_sp(args.n, verify=False)
    p = _module_params(args, alg)
    r = _parse_int_vector(args.r, alg.N, "--r") if args.r else (0,) * alg.N
    report = verify_g1(p, r, args.samples, random.Random(args.seed))
    return _emit(report, args)


def _cmd_g2_table(args) -> int:
    alg = build_sp(args.n, verify=False)
    p = _module_params(args, alg)
    return _emit(verify_g2_table(p), args)


def _cmd_named_actions(args) -> int:
    alg = build_sp(args.n, verify=False)
    p = _module_params(args, alg)
    report = verify_named_actions(p, args.samples, random.Random(args.seed))
    return _emit(report, args)


def _cmd_shift_iso(args) -> int:
    alg = build_sp(args.n, verify=False)
    p = _module_params(args, alg)
    gamma = _parse_int_vector(args.gamma, alg.N, "--gamma")
    report = verify_shift_isomorphism(gamma, p, args.samples, random.Random(args.seed))
    return _emit(report, args)


def _cmd_submodule_check(args) -> int:
    alg = build_sp(args.n, verify=False)
    p = _module_params(args, alg)
    box = Box(args.box, alg.N)
    gens = GeneratorSet(args.gens, alg.N)
    family = build_submodule(args.kind, p, box)
    report = invariance_check(family, gens, method=args.method)
    return _emit(report, args)


def _cmd_claim2_witness(args) -> int:
    alg = build_sp(args.n, verify=False)
    p = _module_params(args, alg)
    r = _parse_int_vector(args.r, alg.N, "--r")
    witness = claim2_witness(p, r, args.k)
    report = {
        "check": "claim2_witness",
        "params": {
            "n": args.n,
            "k": args.k,
            "r": [str(v) for v in r],
            "alpha": [format_scalar(a) for a in p.alpha],
        },
        "witness": [format_scalar(Fraction(x)) for x in witness],
        "samples": 1,
        "passes": 1,
        "failures": [],
    }
    return _emit(report, args)


def _cmd_claim1_ineq(args) -> int:
    return _emit(claim1_inequality(args.n_max), args)


def _cmd_probe(args) -> int:
    alg = build_sp(args.n, verify=False)
    p = _module_params(args, alg)
    box = Box(args.box, alg.N)
    gens = GeneratorSet(args.gens, alg.N)
    report = irreducibility_probe(
        p, box, gens, rng_seed=args.seed, extra_seeds=args.extra_seeds
    )
    return _emit(report, args)


# -- argument wiring -------------------------------------------------------


def _add_common(sp, rep_default=None, samples_default=None):
    sp.add_argument("--n", type=int, required=True, help="rank of the symplectic algebra")
    if rep_default is not None:
        sp.add_argument("--rep", default=rep_default,
                        help="natural | trivial | fundamental:k | sym:k | exterior:k | file:PATH")
        sp.add_argument("--alpha", default=None, help="rational vector p/q,... of length 2n")
        sp.add_argument("--beta", default=None, help="rational vector p/q,... of length 2n")
    if samples_default is not None:
        sp.add_argument("--samples", type=int, default=samples_default)
    sp.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED,
                    help="RNG seed (decimal or 0x hex)")
    sp.add_argument("--output", default=None, help="write the JSON report to this path")
    sp.add_argument("--threads", type=int, default=1,
                    help="worker cap; never affects results")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hamlie",
        description="Exact verification of symplectic representation identities "
                    "and graded module structure.",
    )
    parser.add_argument("--list-checks", action="store_true",
                        help="list subcommands and the invariant each one verifies")
    sub = parser.add_subparsers(dest="command")

    sp = sub.add_parser("sp-check", help=CHECKS["sp-check"])
    _add_common(sp, samples_default=1000)
    sp.set_defaults(func=_cmd_sp_check)

    sp = sub.add_parser("rep-build", help=CHECKS["rep-build"])
    _add_common(sp, rep_default="natural")
    sp.set_defaults(func=_cmd_rep_build)

    sp = sub.add_parser("theta-check", help=CHECKS["theta-check"])
    _add_common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=_cmd_theta_check)

    sp = sub.add_parser("dim-check", help=CHECKS["dim-check"])
    _add_common(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=_cmd_dim_check)

    sp = sub.add_parser("ham-bracket", help=CHECKS["ham-bracket"])
    _add_common(sp, rep_default="natural", samples_default=500)
    sp.set_defaults(func=_cmd_ham_bracket)

    sp = sub.add_parser("g1-check", help=CHECKS["g1-check"])
    _add_common(sp, rep_default="natural", samples_default=50)
    sp.add_argument("--r", default=None, help="integer vector of length 2n")
    sp.set_defaults(func=_cmd_g1_check)

    sp = sub.add_parser("g2-table", help=CHECKS["g2-table"])
    _add_common(sp, rep_default="natural")
    sp.set_defaults(func=_cmd_g2_table)

    sp = sub.add_parser("named-actions", help=CHECKS["named-actions"])
    _add_common(sp, rep_default="natural", samples_default=100)
    sp.set_defaults(func=_cmd_named_actions)

    sp = sub.add_parser("shift-iso", help=CHECKS["shift-iso"])
    _add_common(sp, rep_default="natural", samples_default=100)
    sp.add_argument("--gamma", required=True, help="integer shift vector of length 2n")
    sp.set_defaults(func=_cmd_shift_iso)

    sp = sub.add_parser("submodule-check", help=CHECKS["submodule-check"])
    sp.add_argument("kind", choices=["trivial_line", "delta1", "deltak"])
    _add_common(sp, rep_default="natural")
    sp.add_argument("--box", type=int, default=3)
    sp.add_argument("--gens", type=int, default=2)
    sp.add_argument("--method", choices=["auto", "enumerate", "certificate"], default="auto")
    sp.set_defaults(func=_cmd_submodule_check)

    sp = sub.add_parser("claim2-witness", help=CHECKS["claim2-witness"])
    _add_common(sp, rep_default="natural")
    sp.add_argument("--r", required=True, help="integer vector of length 2n")
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=_cmd_claim2_witness)

    sp = sub.add_parser("claim1-ineq", help=CHECKS["claim1-ineq"])
    sp.add_argument("--n-max", type=int, default=10)
    sp.add_argument("--output", default=None)
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(func=_cmd_claim1_ineq)

    sp = sub.add_parser("probe", help=CHECKS["probe"])
    _add_common(sp, rep_default="natural")
    sp.add_argument("--box", type=int, default=3)
    sp.add_argument("--gens", type=int, default=2)
    sp.add_argument("--extra-seeds", type=int, default=4)
    sp.set_defaults(func=_cmd_probe)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_checks:
        for name, desc in CHECKS.items():
            print(f"{name}: {desc}")
        return 0
    if not getattr(args, "command", None):
        parser.print_usage()
        return 2
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
