"""Exact rational sparse matrices and canonical subspaces.

Scalars are ``fractions.Fraction`` throughout: always in lowest terms,
positive denominator, no floating point anywhere.  Subspaces are kept in
a canonical reduced row-echelon basis (pivot = first nonzero column,
leading entry 1), so equal subspaces compare equal bit-for-bit and every
operation is deterministic.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Sequence

Vector = tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_scalar(text: str) -> Fraction:
    """Parse a rational literal "p/q" or "p"."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def format_scalar(x: Fraction) -> str:
    """Render a rational as "p/q", or "p" when the denominator is 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def as_vector(entries: Iterable) -> Vector:
    return tuple(Fraction(e) for e in entries)


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(ONE if j == i else ZERO for j in range(n))


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v: Vector) -> Vector:
    c = Fraction(c)
    return tuple(c * a for a in v)


def vec_is_zero(v: Vector) -> bool:
    return all(a == 0 for a in v)


def dot(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise ValueError(f"length mismatch: {len(u)} vs {len(v)}")
    return sum((Fraction(a) * Fraction(b) for a, b in zip(u, v)), ZERO)


class SparseMatrix:
    """Immutable sparse rational matrix keyed by (row, col).

    Zero entries are never stored.  All arithmetic is exact.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        clean: dict[tuple[int, int], Fraction] = {}
        if entries:
            for (i, j), v in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise ValueError(f"entry ({i},{j}) out of bounds for {rows}x{cols}")
                v = Fraction(v)
                if v != 0:
                    clean[(i, j)] = v
        self.entries = clean

    # -- construction ------------------------------------------------

    @classmethod
    def from_rows(cls, data: Sequence[Sequence]) -> "SparseMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        entries = {}
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(row):
                v = Fraction(v)
                if v != 0:
                    entries[(i, j)] = v
        return cls(rows, cols, entries)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    # -- access ------------------------------------------------------

    def get(self, i: int, j: int) -> Fraction:
        return self.entries.get((i, j), ZERO)

    def to_rows(self) -> list[list[Fraction]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def row(self, i: int) -> Vector:
        out = [ZERO] * self.cols
        for (r, j), v in self.entries.items():
            if r == i:
                out[j] = v
        return tuple(out)

    def is_zero(self) -> bool:
        return not self.entries

    def nnz(self) -> int:
        return len(self.entries)

    # -- arithmetic --------------------------------------------------

    def _check_same_shape(self, other: "SparseMatrix"):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_same_shape(other)
        entries = dict(self.entries)
        for k, v in other.entries.items():
            entries[k] = entries.get(k, ZERO) + v
        return SparseMatrix(self.rows, self.cols, entries)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        self._check_same_shape(other)
        entries = dict(self.entries)
        for k, v in other.entries.items():
            entries[k] = entries.get(k, ZERO) - v
        return SparseMatrix(self.rows, self.cols, entries)

    def scale(self, c) -> "SparseMatrix":
        c = Fraction(c)
        if c == 0:
            return SparseMatrix(self.rows, self.cols)
        return SparseMatrix(
            self.rows, self.cols, {k: c * v for k, v in self.entries.items()}
        )

    def __neg__(self) -> "SparseMatrix":
        return self.scale(-1)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        # row-indexed view of other for sparse row combination
        other_rows: dict[int, list[tuple[int, Fraction]]] = {}
        for (k, j), v in other.entries.items():
            other_rows.setdefault(k, []).append((j, v))
        acc: dict[tuple[int, int], Fraction] = {}
        for (i, k), a in self.entries.items():
            hits = other_rows.get(k)
            if not hits:
                continue
            for j, b in hits:
                key = (i, j)
                acc[key] = acc.get(key, ZERO) + a * b
        return SparseMatrix(self.rows, other.cols, acc)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()}
        )

    def matvec(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise ValueError(f"vector length {len(v)} != cols {self.cols}")
        out = [ZERO] * self.rows
        for (i, j), a in self.entries.items():
            if v[j]:
                out[i] += a * Fraction(v[j])
        return tuple(out)

    def stack(self, other: "SparseMatrix") -> "SparseMatrix":
        """Vertical concatenation."""
        if self.cols != other.cols:
            raise ValueError("column mismatch in stack")
        entries = dict(self.entries)
        for (i, j), v in other.entries.items():
            entries[(i + self.rows, j)] = v
        return SparseMatrix(self.rows + other.rows, self.cols, entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"

    # -- serialization -----------------------------------------------

    def to_obj(self) -> dict:
        ents = [
            [i, j, format_scalar(v)]
            for (i, j), v in sorted(self.entries.items())
        ]
        return {"rows": self.rows, "cols": self.cols, "entries": ents}

    @classmethod
    def from_obj(cls, obj: dict) -> "SparseMatrix":
        try:
            rows, cols = int(obj["rows"]), int(obj["cols"])
            entries = {
                (int(i), int(j)): parse_scalar(s) for i, j, s in obj["entries"]
            }
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed matrix object: {exc}") from exc
        return cls(rows, cols, entries)

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SparseMatrix":
        return cls.from_obj(json.loads(text))


def _rref_rows(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """In-place reduced row echelon form; returns (rows, pivot columns).

    Pivot selection: first nonzero column, first nonzero row within it.
    """
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots: list[int] = []
    pr = 0
    for pc in range(ncols):
        sel = -1
        for i in range(pr, nrows):
            if rows[i][pc] != 0:
                sel = i
                break
        if sel < 0:
            continue
        rows[pr], rows[sel] = rows[sel], rows[pr]
        inv = 1 / rows[pr][pc]
        if inv != 1:
            rows[pr] = [inv * x for x in rows[pr]]
        prow = rows[pr]
        for i in range(nrows):
            if i == pr:
                continue
            f = rows[i][pc]
            if f != 0:
                ri = rows[i]
                rows[i] = [a - f * b for a, b in zip(ri, prow)]
        pivots.append(pc)
        pr += 1
        if pr == nrows:
            break
    return rows, pivots


def rref(m: SparseMatrix) -> tuple[SparseMatrix, int]:
    """Reduced row echelon form and rank.  Idempotent and deterministic."""
    rows, pivots = _rref_rows(m.to_rows())
    return SparseMatrix.from_rows(rows) if rows else m, len(pivots)


class Subspace:
    """A subspace of Q^n in canonical RREF basis.

    The basis rows have leading entry 1, pivot columns otherwise zero and
    strictly increasing pivots; two Subspace objects are equal iff they
    are the same subspace.
    """

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim: int, basis: tuple[Vector, ...], pivots: tuple[int, ...]):
        # internal constructor; use the classmethods
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, (), ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        basis = tuple(unit_vector(ambient_dim, i) for i in range(ambient_dim))
        return cls(ambient_dim, basis, tuple(range(ambient_dim)))

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        rows = []
        for v in vectors:
            v = list(v)
            if len(v) != ambient_dim:
                raise ValueError(f"vector length {len(v)} != ambient {ambient_dim}")
            rows.append([Fraction(x) for x in v])
        if not rows:
            return cls.zero(ambient_dim)
        rows, pivots = _rref_rows(rows)
        basis = tuple(tuple(r) for r in rows[: len(pivots)])
        return cls(ambient_dim, basis, tuple(pivots))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return len(self.basis) == self.ambient_dim

    def reduce(self, v: Sequence) -> Vector:
        """Residual of v after elimination against the RREF basis."""
        if len(v) != self.ambient_dim:
            raise ValueError(f"vector length {len(v)} != ambient {self.ambient_dim}")
        w = [Fraction(x) for x in v]
        for row, p in zip(self.basis, self.pivots):
            c = w[p]
            if c != 0:
                w = [a - c * b for a, b in zip(w, row)]
        return tuple(w)

    def contains(self, v: Sequence) -> bool:
        return vec_is_zero(self.reduce(v))

    def coordinates(self, v: Sequence) -> Vector | None:
        """Coefficients of v in the RREF basis, or None if v is outside."""
        if len(v) != self.ambient_dim:
            raise ValueError(f"vector length {len(v)} != ambient {self.ambient_dim}")
        w = [Fraction(x) for x in v]
        coords = []
        for row, p in zip(self.basis, self.pivots):
            c = w[p]
            coords.append(c)
            if c != 0:
                w = [a - c * b for a, b in zip(w, row)]
        if not vec_is_zero(tuple(w)):
            return None
        return tuple(coords)

    def add_vector(self, v: Sequence) -> tuple["Subspace", bool]:
        """Enlarged subspace and whether v was actually new."""
        res = self.reduce(v)
        if vec_is_zero(res):
            return self, False
        return Subspace.from_vectors(list(self.basis) + [res], self.ambient_dim), True

    def sum_with(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return Subspace.from_vectors(
            list(self.basis) + list(other.basis), self.ambient_dim
        )

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus intersection of two subspaces."""
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        n = self.ambient_dim
        rows = []
        for v in self.basis:
            rows.append(list(v) + list(v))
        for v in other.basis:
            rows.append(list(v) + [ZERO] * n)
        if not rows:
            return Subspace.zero(n)
        rows, pivots = _rref_rows(rows)
        inter = []
        for r, row in enumerate(rows[: len(pivots)]):
            if pivots[r] >= n:
                inter.append(row[n:])
        return Subspace.from_vectors(inter, n)

    def contains_subspace(self, other: "Subspace") -> bool:
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return all(self.contains(v) for v in other.basis)

    def annihilator(self) -> "Subspace":
        """Row space of functionals vanishing on this subspace."""
        if self.is_zero():
            return Subspace.full(self.ambient_dim)
        m = SparseMatrix.from_rows([list(r) for r in self.basis])
        return nullspace(m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def to_obj(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "basis": [[format_scalar(x) for x in row] for row in self.basis],
        }

    @classmethod
    def from_obj(cls, obj: dict) -> "Subspace":
        try:
            dim = int(obj["ambient_dim"])
            rows = [[parse_scalar(x) for x in row] for row in obj["basis"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed subspace object: {exc}") from exc
        return cls.from_vectors(rows, dim)


def nullspace(m: SparseMatrix) -> Subspace:
    """Canonical basis of the right kernel {v : m v = 0}."""
    rows, pivots = _rref_rows(m.to_rows()) if m.rows else ([], [])
    pivset = set(pivots)
    free = [j for j in range(m.cols) if j not in pivset]
    vectors = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -rows[r][f]
        vectors.append(v)
    return Subspace.from_vectors(vectors, m.cols)
