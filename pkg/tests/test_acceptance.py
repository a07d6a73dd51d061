"""Acceptance gate: the twelve exactness criteria with runtime budgets.

Every comparison is exact; there are no tolerances anywhere.  Reports
produced by the randomized criteria are rebuilt from the same seed in the
determinism criterion and compared byte for byte.
"""

import json
import random
import time
from contextlib import contextmanager
from fractions import Fraction
from math import comb

import pytest

from hamlie.hamiltonian import (
    GradedVector,
    ModuleParams,
    verify_g2_table,
    verify_ham_bracket,
    verify_named_actions,
    verify_shift_isomorphism,
)
from hamlie.linalg import Subspace, format_scalar, nullspace, parse_scalar
from hamlie.reps import build_rep, contraction_theta, verify_intertwiner
from hamlie.submodules import (
    Box,
    GeneratorSet,
    build_submodule,
    claim1_inequality,
    claim2_witness,
    invariance_check,
    irreducibility_probe,
)
from hamlie.symplectic import (
    bar,
    build_sp,
    pairing,
    positive_roots,
    rank_one,
    root_height,
    sp_decompose,
)

F = Fraction
SEED = 0xC0FFEE


@contextmanager
def budget(seconds):
    start = time.monotonic()
    yield
    elapsed = time.monotonic() - start
    assert elapsed < seconds, f"budget exceeded: {elapsed:.1f}s >= {seconds}s"


def _params(n, spec, alpha=None, beta=None):
    alg = build_sp(n, verify=False)
    rep = build_rep(alg, spec)
    N = alg.N
    alpha = alpha or (0,) * N
    beta = beta or (0,) * N
    return ModuleParams(alpha, beta, rep)


def _dumps(report):
    return json.dumps(report, sort_keys=True, indent=2).encode()


# -- criterion 1: sp structure ---------------------------------------------


def test_criterion_01_sp_structure():
    with budget(10):
        algs = {n: build_sp(n, verify=True) for n in (1, 2, 3, 4)}
        rng = random.Random(SEED)
        for _ in range(1000):
            n = rng.choice((1, 2, 3, 4))
            r = tuple(rng.randint(-6, 6) for _ in range(2 * n))
            sp_decompose(rank_one(r), algs[n])


# -- criterion 2: pairing antisymmetry --------------------------------------


def test_criterion_02_pairing_antisymmetry():
    with budget(1):
        rng = random.Random(SEED)
        for _ in range(10**4):
            N = 2 * rng.choice((1, 2, 3))
            r = tuple(rng.randint(-9, 9) for _ in range(N))
            s = tuple(rng.randint(-9, 9) for _ in range(N))
            assert pairing(bar(r), s) == -pairing(bar(s), r)


# -- criterion 3: height closed forms ----------------------------------------


def test_criterion_03_height_closed_forms():
    with budget(1):
        for n in range(1, 11):
            for root in positive_roots(n):
                h = root_height(root, n).height
                nz = [(i + 1, c) for i, c in enumerate(root) if c != 0]
                if any(c < 0 for _, c in nz):
                    i, j = nz[0][0], nz[1][0]
                    assert h == j - i  # additivity of H(e_i - e_{i+1}) = 1
                    if j == i + 1:
                        assert h == 1
                else:
                    idxs = [i for i, c in nz for _ in range(c)]
                    i, j = idxs[0], idxs[-1]
                    assert h == 2 * n - (i + j) + 1


# -- criterion 4: theta equivariance and kernel dimensions -------------------


def test_criterion_04_theta_equivariance_dims():
    with budget(60):
        for n in (2, 3, 4):
            alg = build_sp(n, verify=False)
            for k in range(2, n + 1):
                theta = contraction_theta(alg, k)
                ok, violations = verify_intertwiner(theta)
                assert ok, violations
                want = comb(2 * n, k) - comb(2 * n, k - 2)
                assert nullspace(theta.matrix).dim == want


# -- criterion 5: module bracket law -----------------------------------------


def _bracket_report(seed):
    rng = random.Random(seed)
    cases = [(1, "natural"), (2, "natural"), (3, "natural"),
             (2, "fundamental:2"), (3, "fundamental:2"),
             (1, "sym:2"), (2, "sym:2"), (3, "sym:2")]
    per_rep = {"natural": 0, "fundamental:2": 0, "sym:2": 0}
    failures = []
    skipped = 0
    total = 0
    while min(per_rep.values()) < 500:
        n, spec = cases[rng.randrange(len(cases))]
        N = 2 * n
        alpha = tuple(F(rng.randint(-3, 3), rng.choice((1, 2, 3))) for _ in range(N))
        p = _params(n, spec, alpha=alpha)
        r = tuple(rng.randint(-2, 2) for _ in range(N))
        s = tuple(rng.randint(-2, 2) for _ in range(N))
        x = GradedVector(
            tuple(rng.randint(-2, 2) for _ in range(N)),
            tuple(F(rng.randint(-4, 4)) for _ in range(p.rep.dim)),
        )
        res = verify_ham_bracket(r, s, x, p)
        total += 1
        per_rep[spec] += 1
        if res is None:
            skipped += 1
        elif not res:
            failures.append({
                "n": n, "rep": spec, "r": list(r), "s": list(s),
                "grade": list(x.grade),
                "payload": [format_scalar(v) for v in x.payload],
                "alpha": [format_scalar(a) for a in alpha],
            })
    return {
        "check": "bracket_law",
        "params": {"rng_seed": seed, "per_rep_minimum": 500},
        "samples": total,
        "skipped": skipped,
        "passes": total - skipped - len(failures),
        "failures": failures,
    }


@pytest.fixture(scope="module")
def bracket_report():
    start = time.monotonic()
    report = _bracket_report(SEED)
    report_elapsed = time.monotonic() - start
    return report, report_elapsed


def test_criterion_05_bracket_law(bracket_report):
    report, elapsed = bracket_report
    assert elapsed < 30
    assert report["failures"] == []
    assert report["samples"] >= 1500


# -- criterion 6: g2 degree-4 table -------------------------------------------


def test_criterion_06_g2_table():
    with budget(60):
        cases = [(2, "natural"), (2, "fundamental:2"), (2, "sym:2"),
                 (3, "natural"), (3, "fundamental:2")]
        for n, spec in cases:
            alpha = (F(1, 2),) + (0,) * (2 * n - 1)
            report = verify_g2_table(_params(n, spec, alpha=alpha))
            assert report["failures"] == [], (n, spec)
            assert report["passes"] == report["samples"] > 0


# -- criterion 7: named actions and shift isomorphism -------------------------


def test_criterion_07_named_actions_shift_iso():
    with budget(10):
        rng = random.Random(SEED)
        for n, spec in [(2, "natural"), (2, "fundamental:2")]:
            p = _params(n, spec, alpha=(F(1, 3),) + (0,) * (2 * n - 1))
            report = verify_named_actions(p, 100, rng)
            assert report["failures"] == []
        p = _params(1, "natural", alpha=(F(1, 2), 0))
        assert verify_shift_isomorphism((0, 0), p, 100, rng)["failures"] == []
        assert verify_shift_isomorphism((1, 0), p, 100, rng)["failures"] == []
        p = _params(2, "fundamental:2", alpha=(F(1, 3), 0, 0, 0))
        assert verify_shift_isomorphism((0, 1, 1, 0), p, 100, rng)["failures"] == []


# -- criterion 8: explicit submodules invariant --------------------------------


def test_criterion_08_submodule_invariance():
    with budget(120):
        box_radius, gen_radius = 3, 2
        cases = []
        for n in (2, 3):
            N = 2 * n
            integral = (1,) + (0,) * (N - 1)
            generic = (F(1, 3),) + (0,) * (N - 1)
            cases.append(("trivial_line", n, "trivial", integral, None))
            cases.append(("delta1", n, "natural", integral, None))
            cases.append(("delta1", n, "natural", generic, None))
            for k in range(2, n + 1):
                cases.append(("deltak", n, f"fundamental:{k}", integral, k))
                cases.append(("deltak", n, f"fundamental:{k}", generic, k))
        for kind, n, spec, alpha, k in cases:
            p = _params(n, spec, alpha=alpha)
            fam = build_submodule(kind, p, Box(box_radius, 2 * n))
            report = invariance_check(fam, GeneratorSet(gen_radius, 2 * n))
            assert report["failures"] == [], (kind, n, spec)
            assert report["passes"] > 0


# -- criterion 9: claim-2 witnesses --------------------------------------------


def _witness_report(seed):
    rng = random.Random(seed)
    reps = {}
    failures = []
    entries = []
    for _ in range(200):
        n = rng.choice((2, 3))
        k = rng.randint(2, n)
        key = (n, k)
        if key not in reps:
            reps[key] = _params(n, f"fundamental:{k}")
        p = reps[key]
        N = 2 * n
        while True:
            alpha = tuple(F(rng.randint(-3, 3), rng.choice((1, 2, 5, 7)))
                          for _ in range(N))
            r = tuple(rng.randint(-3, 3) for _ in range(N))
            if any(F(g) + a != 0 for g, a in zip(r, alpha)):
                break
        p = ModuleParams(alpha, (0,) * N, p.rep)
        try:
            w = claim2_witness(p, r, k)
            entries.append({
                "n": n, "k": k, "r": list(r),
                "alpha": [format_scalar(a) for a in alpha],
                "witness": [format_scalar(F(v)) for v in w],
            })
        except AssertionError as exc:
            failures.append({"n": n, "k": k, "r": list(r), "error": str(exc)})
    return {
        "check": "claim2_witnesses",
        "params": {"rng_seed": seed},
        "samples": 200,
        "passes": 200 - len(failures),
        "failures": failures,
        "entries": entries,
    }


@pytest.fixture(scope="module")
def witness_report():
    start = time.monotonic()
    report = _witness_report(SEED)
    return report, time.monotonic() - start


def test_criterion_09_claim2_witnesses(witness_report):
    report, elapsed = witness_report
    assert elapsed < 30
    assert report["failures"] == []


# -- criterion 10: claim-1 inequality sweep -------------------------------------
#
# The inequality C(2n,k) - C(2n,k-2) > C(2n-1,k-1) genuinely fails at
# k = n for n >= 6 (e.g. n=k=6: 429 < 462).  The implementation computes
# the sweep faithfully; this criterion records the discrepancy honestly
# rather than weakening the check.


def test_criterion_10_claim1_sweep():
    with budget(1):
        report = claim1_inequality(10)
        assert report["failures"] == [], (
            "the inequality fails at these (n, k); see the entries table: "
            f"{report['failures']}"
        )


# -- criterion 11: probe separations --------------------------------------------


def _probe_reports():
    box2 = Box(3, 2)
    gens2 = GeneratorSet(2, 2)
    box4 = Box(3, 4)
    gens4 = GeneratorSet(2, 4)
    out = {}
    out["a"] = irreducibility_probe(
        _params(1, "trivial", alpha=(F(1, 2), 0)), box2, gens2)
    out["b"] = irreducibility_probe(
        _params(1, "trivial", alpha=(1, 1)), box2, gens2)
    out["c1"] = irreducibility_probe(
        _params(1, "natural", alpha=(F(1, 3), 0)), box2, gens2)
    out["c2"] = irreducibility_probe(
        _params(2, "natural", alpha=(F(1, 3), 0, 0, 0)), box4, gens4)
    out["d"] = irreducibility_probe(
        _params(2, "fundamental:2", alpha=(F(1, 3), 0, 0, 0)), box4, gens4)
    out["e"] = irreducibility_probe(
        _params(2, "sym:2", alpha=(F(1, 3), 0, 0, 0)), box4, gens4)
    return out


@pytest.fixture(scope="module")
def probe_reports():
    start = time.monotonic()
    reports = _probe_reports()
    return reports, time.monotonic() - start


def _family_spaces(obj, ambient_dim):
    spaces = {}
    for key, rows in obj["spaces"].items():
        grade = tuple(int(x) for x in key.split(","))
        vecs = [[parse_scalar(x) for x in row] for row in rows]
        spaces[grade] = Subspace.from_vectors(vecs, ambient_dim)
    return spaces


def test_criterion_11_probe_separations(probe_reports):
    reports, elapsed = probe_reports
    assert elapsed < 600
    assert reports["a"]["verdict"] == "FULL"
    assert "caveat" in reports["a"]
    assert reports["b"]["verdict"] == "PROPER"
    assert reports["c1"]["verdict"] == "PROPER"
    assert reports["c2"]["verdict"] == "PROPER"
    assert reports["d"]["verdict"] == "PROPER"
    assert reports["e"]["verdict"] == "FULL"

    # (c) the detected family is exactly the delta1 family, gradewise
    for key, n in [("c1", 1), ("c2", 2)]:
        N = 2 * n
        p = _params(n, "natural", alpha=(F(1, 3),) + (0,) * (N - 1))
        delta1 = build_submodule("delta1", p, Box(3, N))
        detected = _family_spaces(reports[key]["detected_family"], N)
        for g in delta1.box.grades():
            assert detected[g] == delta1.space(g), (key, g)

    # (d) the detected family contains the deltak family, gradewise
    p = _params(2, "fundamental:2", alpha=(F(1, 3), 0, 0, 0))
    deltak = build_submodule("deltak", p, Box(3, 4))
    detected = _family_spaces(reports["d"]["detected_family"], p.rep.dim)
    for g in deltak.box.grades():
        assert detected[g].contains_subspace(deltak.space(g)), g


# -- criterion 12: byte-identical determinism ------------------------------------


def test_criterion_12_determinism(bracket_report, witness_report, probe_reports):
    assert _dumps(_bracket_report(SEED)) == _dumps(bracket_report[0])
    assert _dumps(_witness_report(SEED)) == _dumps(witness_report[0])
    assert _dumps(_probe_reports()) == _dumps(probe_reports[0])
