"""Module action, bracket law, and the g1/g2 coefficient systems."""

import random
from fractions import Fraction

import pytest

from hamlie.hamiltonian import (
    GradedVector,
    ModuleParams,
    act_H,
    act_d,
    bracket_zero_sum_check,
    g1_polynomial,
    g2_polynomial,
    verify_g1,
    verify_g2_table,
    verify_ham_bracket,
    verify_named_actions,
    verify_shift_isomorphism,
)
from hamlie.linalg import SparseMatrix
from hamlie.reps import build_rep, natural_rep, trivial_rep
from hamlie.symplectic import build_sp

F = Fraction


def _params(n, spec, alpha=None, beta=None):
    alg = build_sp(n, verify=False)
    rep = build_rep(alg, spec)
    N = alg.N
    alpha = alpha or (0,) * N
    beta = beta or (0,) * N
    return ModuleParams(alpha, beta, rep)


def test_act_H_natural_n1():
    p = _params(1, "natural")
    out = act_H((0, 1), GradedVector((0, 0), (1, 0)), p)
    assert out.grade == (0, 1)
    assert out.payload == (F(0), F(1))
    out = act_H((1, 0), GradedVector((0, 0), (1, 0)), p)
    assert out.is_zero()


def test_act_H_trivial_line_annihilated():
    p = _params(1, "trivial", alpha=(1, 0))
    x = GradedVector((-1, 0), (1,))
    for r in [(1, 0), (0, 1), (2, -1), (-1, -1)]:
        assert act_H(r, x, p).is_zero()


def test_act_H_rejects_zero():
    p = _params(1, "natural")
    with pytest.raises(ValueError):
        act_H((0, 0), GradedVector((0, 0), (1, 0)), p)


def test_act_d():
    p = _params(1, "natural", beta=(F(1, 2), 0))
    x = GradedVector((2, 0), (1, 3))
    out = act_d(1, x, p)
    assert out.grade == x.grade
    assert out.payload == (F(5, 2), F(15, 2))
    assert act_d(2, GradedVector((0, 0), (1, 1)), p).is_zero()
    y = act_d(1, act_d(2, x, p), p)
    z = act_d(2, act_d(1, x, p), p)
    assert y == z
    with pytest.raises(ValueError):
        act_d(3, x, p)


def test_bracket_hand_example():
    # n=1, alpha=0: [H_(1,0), H_(0,1)] e1 t^0 = (-e1-e2) t^(1,1)
    p = _params(1, "natural")
    x = GradedVector((0, 0), (1, 0))
    a = act_H((1, 0), act_H((0, 1), x, p), p)
    b = act_H((0, 1), act_H((1, 0), x, p), p)
    lhs = tuple(u - v for u, v in zip(a.payload, b.payload))
    assert a.grade == (1, 1) and lhs == (F(-1), F(-1))
    assert verify_ham_bracket((1, 0), (0, 1), x, p) is True


def test_bracket_skips_and_diagonal():
    p = _params(1, "natural")
    x = GradedVector((1, 2), (2, -3))
    assert verify_ham_bracket((1, 1), (-1, -1), x, p) is None
    assert verify_ham_bracket((0, 0), (1, 0), x, p) is None
    assert verify_ham_bracket((1, 1), (1, 1), x, p) is True
    assert bracket_zero_sum_check((1, 2), x, p)


def test_bracket_random_sweep():
    rng = random.Random(3)
    for spec in ["natural", "fundamental:2"]:
        p = _params(2, spec, alpha=(F(1, 2), 0, F(1, 3), 0))
        dim = p.rep.dim
        for _ in range(40):
            r = tuple(rng.randint(-2, 2) for _ in range(4))
            s = tuple(rng.randint(-2, 2) for _ in range(4))
            x = GradedVector(
                tuple(rng.randint(-2, 2) for _ in range(4)),
                tuple(F(rng.randint(-4, 4)) for _ in range(dim)),
            )
            assert verify_ham_bracket(r, s, x, p) is not False


def test_g1_coefficients_n1():
    p = _params(1, "natural")
    g1 = g1_polynomial((0, 0), p)
    assert g1.degree() <= 2
    # s1^2 coefficient is -(1/2) rho(X(2e1)) = [[0,-1],[0,0]]
    assert g1.coefficient((2, 0)) == SparseMatrix.from_rows([[0, -1], [0, 0]])
    assert g1.coefficient((1, 1)) == SparseMatrix.from_rows([[1, 0], [0, -1]])
    assert g1.coefficient((0, 0)).is_zero()


def test_g1_report():
    rng = random.Random(5)
    p = _params(2, "sym:2", alpha=(F(1, 3), 0, 0, 0))
    report = verify_g1(p, (1, 0, -1, 2), 20, rng)
    assert report["failures"] == []


def test_g2_trivial_rep_identity():
    # trivial rep with (bar r, k+alpha) = 0: the product collapses to
    # -(bar s, r+k+alpha)(bar s, k+alpha)
    from hamlie.symplectic import bar, pairing

    p = _params(1, "trivial", alpha=(F(1, 2), 0))
    r, k = (3, 2), (1, 1)
    kalpha = tuple(F(a) + b for a, b in zip(k, p.alpha))
    assert pairing(bar(r), kalpha) == 0
    g2 = g2_polynomial(r, k, p)
    rng = random.Random(9)
    for _ in range(10):
        s = tuple(rng.randint(-3, 3) for _ in range(2))
        val = g2.evaluate(s).get(0, 0)
        ralpha = tuple(F(a) + b for a, b in zip((x + y for x, y in zip(r, k)), p.alpha))
        assert val == -pairing(bar(s), ralpha) * pairing(bar(s), kalpha)


def test_g2_s1_fourth_coefficient():
    p = _params(1, "natural")
    g2 = g2_polynomial((1, 1), (0, 0), p)
    assert g2.coefficient((4, 0)).is_zero()
    padj = _params(1, "sym:2")
    g2 = g2_polynomial((1, 1), (0, 0), padj)
    x = padj.rep.act("X(2e1)")
    assert g2.coefficient((4, 0)) == (x @ x).scale(F(1, 4))


def test_g2_table_reports():
    for n, spec in [(1, "natural"), (2, "natural"), (2, "fundamental:2")]:
        alpha = (F(1, 2),) + (0,) * (2 * n - 1)
        p = _params(n, spec, alpha=alpha)
        report = verify_g2_table(p)
        assert report["failures"] == []
        assert report["passes"] == report["samples"] > 0


def test_named_actions_reports():
    rng = random.Random(13)
    for n, spec in [(1, "natural"), (2, "fundamental:2")]:
        p = _params(n, spec, alpha=(F(1, 3),) + (0,) * (2 * n - 1))
        report = verify_named_actions(p, 30, rng)
        assert report["failures"] == []


def test_shift_isomorphism_reports():
    rng = random.Random(17)
    p = _params(1, "natural", alpha=(F(1, 2), 0), beta=(0, 1))
    report = verify_shift_isomorphism((0, 0), p, 20, rng)
    assert report["failures"] == []
    report = verify_shift_isomorphism((1, 0), p, 100, rng)
    assert report["failures"] == []
    p2 = _params(2, "fundamental:2", alpha=(F(1, 3), 0, 0, 0))
    report = verify_shift_isomorphism((0, 1, 1, 0), p2, 100, rng)
    assert report["failures"] == []
