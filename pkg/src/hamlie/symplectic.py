"""The symplectic Lie algebra sp_2n with root metadata.

Basis normalization: h_i = e_ii - e_{n+i,n+i}, X_{eps_i-eps_j} = e_ij -
e_{n+j,n+i}, X_{eps_k+eps_l} = e_{k,n+l} + e_{l,n+k} (so X_{2eps_k} =
2 e_{k,n+k}), X_{-eps_k-eps_l} = e_{n+k,l} + e_{n+l,k}.  Basis order:
h_1..h_n, then X_{eps_i-eps_j} lexicographic over i != j, then the
X_{eps_k+eps_l} with k <= l, then the X_{-eps_k-eps_l} with k <= l.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import SparseMatrix, ZERO, ONE, Vector, format_scalar


@dataclass(frozen=True)
class SpBasisElement:
    label: str
    matrix: SparseMatrix
    # root in eps-coordinates (length n); all-zero for Cartan elements
    root: tuple


@dataclass(frozen=True)
class RootDatum:
    root: tuple
    simple_coeffs: tuple
    height: int


def _eps(n: int, i: int, coeff: int = 1) -> tuple:
    v = [0] * n
    v[i] = coeff
    return tuple(v)


def _eps_sum(n: int, i: int, j: int, si: int, sj: int) -> tuple:
    v = [0] * n
    v[i] += si
    v[j] += sj
    return tuple(v)


class SpAlgebra:
    """Immutable container for the sp_2n basis and root data."""

    def __init__(self, n: int, basis: list, simple_roots: list):
        self.n = n
        self.N = 2 * n
        self.dim = 2 * n * n + n
        self.basis = basis
        self.labels = [b.label for b in basis]
        self.matrices = {b.label: b.matrix for b in basis}
        self.roots = {b.label: b.root for b in basis}
        self.simple_roots = simple_roots

    def cartan_labels(self) -> list:
        return [f"h{i + 1}" for i in range(self.n)]

    def positive_labels(self) -> list:
        """Labels of the positive-root basis elements (raising operators)."""
        out = []
        for i in range(self.n):
            for j in range(self.n):
                if i < j:
                    out.append(f"X(e{i + 1}-e{j + 1})")
        for k in range(self.n):
            for l in range(k, self.n):
                out.append(_plus_label(k, l))
        return out

    def __repr__(self):
        return f"SpAlgebra(n={self.n}, dim={self.dim})"

    def to_obj(self) -> dict:
        return {
            "n": self.n,
            "labels": list(self.labels),
            "matrices": {b.label: b.matrix.to_obj() for b in self.basis},
        }


def _plus_label(k: int, l: int) -> str:
    if k == l:
        return f"X(2e{k + 1})"
    return f"X(e{k + 1}+e{l + 1})"


def _minus_label(k: int, l: int) -> str:
    if k == l:
        return f"X(-2e{k + 1})"
    return f"X(-e{k + 1}-e{l + 1})"


def build_sp(n: int, verify: bool = True) -> SpAlgebra:
    """Construct sp_2n; optionally verify bracket closure and the
    symplectic condition for every basis matrix."""
    if n < 1:
        raise ValueError("rank must be at least 1")
    N = 2 * n
    basis = []

    def mat(entries):
        return SparseMatrix(N, N, {k: Fraction(v) for k, v in entries.items()})

    for i in range(n):
        basis.append(
            SpBasisElement(f"h{i + 1}", mat({(i, i): 1, (n + i, n + i): -1}), _eps(n, i, 0))
        )
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            basis.append(
                SpBasisElement(
                    f"X(e{i + 1}-e{j + 1})",
                    mat({(i, j): 1, (n + j, n + i): -1}),
                    _eps_sum(n, i, j, 1, -1),
                )
            )
    for k in range(n):
        for l in range(k, n):
            ent = {(k, n + l): 1}
            ent[(l, n + k)] = ent.get((l, n + k), 0) + 1
            basis.append(
                SpBasisElement(_plus_label(k, l), mat(ent), _eps_sum(n, k, l, 1, 1))
            )
    for k in range(n):
        for l in range(k, n):
            ent = {(n + k, l): 1}
            ent[(n + l, k)] = ent.get((n + l, k), 0) + 1
            basis.append(
                SpBasisElement(_minus_label(k, l), mat(ent), _eps_sum(n, k, l, -1, -1))
            )

    simple = [_eps_sum(n, i, i + 1, 1, -1) for i in range(n - 1)]
    simple.append(_eps(n, n - 1, 2))
    alg = SpAlgebra(n, basis, simple)

    if verify:
        for b in basis:
            if not is_symplectic(b.matrix, n):
                raise AssertionError(f"basis element {b.label} fails the symplectic condition")
        for x in basis:
            for y in basis:
                sp_decompose(bracket(x.matrix, y.matrix), alg)
    return alg


def bracket(x: SparseMatrix, y: SparseMatrix) -> SparseMatrix:
    """Matrix commutator xy - yx."""
    if x.rows != x.cols or y.rows != y.cols or x.rows != y.rows:
        raise ValueError("bracket requires square matrices of equal size")
    return (x @ y) - (y @ x)


def bar(r: Sequence) -> tuple:
    """r = (r_1..r_n, r_{n+1}..r_{2n}) -> (r_{n+1}..r_{2n}, -r_1..-r_n)."""
    if len(r) % 2 != 0:
        raise ValueError("bar requires an even-length vector")
    n = len(r) // 2
    return tuple(r[n:]) + tuple(-x for x in r[:n])


def pairing(u: Sequence, v: Sequence) -> Fraction:
    """Standard bilinear form sum(u_i v_i)."""
    if len(u) != len(v):
        raise ValueError("pairing requires equal-length vectors")
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v)), ZERO)


def rank_one(r: Sequence) -> SparseMatrix:
    """The matrix r bar(r)^t, which lies in sp_N."""
    rb = bar(r)
    N = len(r)
    entries = {}
    for i in range(N):
        if r[i] == 0:
            continue
        for j in range(N):
            if rb[j] == 0:
                continue
            entries[(i, j)] = Fraction(r[i]) * Fraction(rb[j])
    return SparseMatrix(N, N, entries)


def sym_outer(u: Sequence, v: Sequence) -> SparseMatrix:
    """u bar(v)^t + v bar(u)^t, the polarization of r bar(r)^t; always in sp_N."""
    ub, vb = bar(u), bar(v)
    N = len(u)
    entries = {}
    for i in range(N):
        for j in range(N):
            val = Fraction(u[i]) * Fraction(vb[j]) + Fraction(v[i]) * Fraction(ub[j])
            if val != 0:
                entries[(i, j)] = val
    return SparseMatrix(N, N, entries)


def symplectic_form_matrix(n: int) -> SparseMatrix:
    """J with J v = bar(v)."""
    entries = {}
    for i in range(n):
        entries[(i, n + i)] = ONE
        entries[(n + i, i)] = -ONE
    return SparseMatrix(2 * n, 2 * n, entries)


def is_symplectic(m: SparseMatrix, n: int) -> bool:
    j = symplectic_form_matrix(n)
    return (m.transpose() @ j + j @ m).is_zero()


def sp_decompose(m: SparseMatrix, alg: SpAlgebra) -> dict:
    """Coefficients of m in the sp basis; error if m is not in the span.

    Uses the block structure [[A, B], [C, -A^t]]: the coefficient of h_a
    is A[a][a], of X_{eps_i-eps_j} is A[i][j], of X_{2eps_k} is B[k][k]/2,
    of X_{eps_k+eps_l} (k<l) is B[k][l], and similarly for C.
    """
    n = alg.n
    N = alg.N
    if m.rows != N or m.cols != N:
        raise ValueError(f"expected a {N}x{N} matrix")
    coeffs = {}

    def put(label, val):
        if val != 0:
            coeffs[label] = val

    for a in range(n):
        put(f"h{a + 1}", m.get(a, a))
    for i in range(n):
        for j in range(n):
            if i != j:
                put(f"X(e{i + 1}-e{j + 1})", m.get(i, j))
    for k in range(n):
        put(_plus_label(k, k), m.get(k, n + k) / 2)
        put(_minus_label(k, k), m.get(n + k, k) / 2)
        for l in range(k + 1, n):
            put(_plus_label(k, l), m.get(k, n + l))
            put(_minus_label(k, l), m.get(n + k, l))

    recon = SparseMatrix(N, N)
    for label, c in coeffs.items():
        recon = recon + alg.matrices[label].scale(c)
    if recon != m:
        raise ValueError("matrix is not in the span of the sp basis")
    return coeffs


def combine(coeffs: dict, matrices: dict, rows: int, cols: int) -> SparseMatrix:
    """Linear combination sum coeffs[label] * matrices[label]."""
    out = SparseMatrix(rows, cols)
    for label, c in coeffs.items():
        out = out + matrices[label].scale(c)
    return out


def positive_roots(n: int) -> list:
    """All positive roots of sp_2n in eps-coordinates."""
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            out.append(_eps_sum(n, i, j, 1, -1))
    for i in range(n):
        for j in range(i, n):
            out.append(_eps_sum(n, i, j, 1, 1))
    return out


def root_height(root: Sequence, n: int) -> RootDatum:
    """Simple-root coefficients and height of a positive root."""
    root = tuple(int(x) for x in root)
    if len(root) != n:
        raise ValueError(f"root must have length {n}")
    if root not in set(positive_roots(n)):
        raise ValueError(f"{root} is not a positive root of sp_{2 * n}")
    # solve root = sum a_t alpha_t: coordinate recurrences
    a = [0] * n
    prev = 0
    for i in range(n - 1):
        a[i] = prev + root[i]
        prev = a[i]
    last = prev + root[n - 1]
    if last % 2 != 0:
        raise ValueError(f"{root} is not in the root lattice span")
    a[n - 1] = last // 2
    if any(x < 0 for x in a):
        raise ValueError(f"{root} is not a positive root of sp_{2 * n}")
    return RootDatum(root, tuple(a), sum(a))
