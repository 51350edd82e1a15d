"""Exact dense matrices and row reduction over Q(zeta_m).

Elimination uses exact field division with a deterministic pivot rule:
always the first nonzero entry in the fixed coordinate order.  The same
rule drives the incremental reducer that backs every per-degree image
basis, so ranks, bases, and solution witnesses are reproducible.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import FieldMismatchError, SingularMatrixError
from .field import CyclotomicScalar, FieldConfig


class Matrix:
    """Immutable matrix with CyclotomicScalar entries."""

    __slots__ = ("rows", "nrows", "ncols", "config")

    def __init__(self, rows, config: FieldConfig):
        mat = tuple(tuple(config.scalar(e) for e in row) for row in rows)
        if mat and any(len(r) != len(mat[0]) for r in mat):
            raise ValueError("ragged rows")
        object.__setattr__(self, "rows", mat)
        object.__setattr__(self, "nrows", len(mat))
        object.__setattr__(self, "ncols", len(mat[0]) if mat else 0)
        object.__setattr__(self, "config", config)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def identity(cls, n: int, config: FieldConfig) -> "Matrix":
        return cls(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)], config
        )

    @classmethod
    def zero(cls, nrows: int, ncols: int, config: FieldConfig) -> "Matrix":
        return cls([[0] * ncols for _ in range(nrows)], config)

    def entry(self, i: int, j: int) -> CyclotomicScalar:
        return self.rows[i][j]

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.rows for e in row)

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.config.m == other.config.m
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.config.m, self.rows))

    def __add__(self, other):
        self._compat(other)
        return Matrix(
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ],
            self.config,
        )

    def __sub__(self, other):
        self._compat(other)
        return Matrix(
            [
                [a - b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.rows, other.rows)
            ],
            self.config,
        )

    def _compat(self, other):
        if self.config.m != other.config.m:
            raise FieldMismatchError("mixed conductors in matrix arithmetic")
        if self.nrows != other.nrows or self.ncols != other.ncols:
            raise ValueError("matrix shape mismatch")

    def scale(self, value) -> "Matrix":
        c = self.config.scalar(value)
        return Matrix([[e * c for e in row] for row in self.rows], self.config)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicScalar)):
            return self.scale(other)
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.config.m != other.config.m:
            raise FieldMismatchError("mixed conductors in matrix product")
        if self.ncols != other.nrows:
            raise ValueError("inner dimension mismatch")
        cols = list(zip(*other.rows)) if other.rows else []
        zero = self.config.zero
        out = []
        for row in self.rows:
            out_row = []
            for col in cols:
                acc = zero
                for a, b in zip(row, col):
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                out_row.append(acc)
            out.append(out_row)
        return Matrix(out, self.config)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicScalar)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, e: int):
        if not self.is_square() or e < 0:
            raise ValueError("matrix powers need a square base and e >= 0")
        acc = Matrix.identity(self.nrows, self.config)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            if e > 1:
                base = base * base
            e >>= 1
        return acc

    def transpose(self) -> "Matrix":
        return Matrix(list(zip(*self.rows)) if self.rows else [], self.config)

    # -- elimination ------------------------------------------------------------

    def rref(self):
        """(reduced matrix rows, pivot column tuple); exact, deterministic."""
        work = [list(row) for row in self.rows]
        pivots = []
        r = 0
        for c in range(self.ncols):
            pivot_row = None
            for i in range(r, self.nrows):
                if not work[i][c].is_zero():
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            work[r], work[pivot_row] = work[pivot_row], work[r]
            inv = work[r][c].inverse()
            work[r] = [e * inv for e in work[r]]
            for i in range(self.nrows):
                if i != r and not work[i][c].is_zero():
                    factor = work[i][c]
                    work[i] = [a - factor * b for a, b in zip(work[i], work[r])]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        return work, tuple(pivots)

    def rank(self) -> int:
        _, pivots = self.rref()
        return len(pivots)

    def det(self) -> CyclotomicScalar:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        work = [list(row) for row in self.rows]
        n = self.nrows
        det = self.config.one
        for c in range(n):
            pivot_row = None
            for i in range(c, n):
                if not work[i][c].is_zero():
                    pivot_row = i
                    break
            if pivot_row is None:
                return self.config.zero
            if pivot_row != c:
                work[c], work[pivot_row] = work[pivot_row], work[c]
                det = -det
            det = det * work[c][c]
            inv = work[c][c].inverse()
            for i in range(c + 1, n):
                if not work[i][c].is_zero():
                    factor = work[i][c] * inv
                    work[i] = [a - factor * b for a, b in zip(work[i], work[c])]
        return det

    def inverse(self) -> "Matrix":
        if not self.is_square():
            raise SingularMatrixError("only square matrices can be inverted")
        n = self.nrows
        aug = Matrix(
            [
                list(self.rows[i]) + [1 if j == i else 0 for j in range(n)]
                for i in range(n)
            ],
            self.config,
        )
        reduced, pivots = aug.rref()
        if tuple(pivots) != tuple(range(n)):
            raise SingularMatrixError("matrix is singular")
        return Matrix([row[n:] for row in reduced], self.config)

    def nullspace(self) -> list:
        """Deterministic basis of the right nullspace, as coordinate lists."""
        reduced, pivots = self.rref()
        pivot_set = set(pivots)
        free = [c for c in range(self.ncols) if c not in pivot_set]
        basis = []
        for fc in free:
            vec = [self.config.zero] * self.ncols
            vec[fc] = self.config.one
            for r, pc in enumerate(pivots):
                vec[pc] = -reduced[r][fc]
            basis.append(vec)
        return basis

    def apply_row(self, vec) -> list:
        """Row vector times this matrix."""
        if len(vec) != self.nrows:
            raise ValueError("vector length mismatch")
        cols = list(zip(*self.rows))
        return [
            sum((v * c for v, c in zip(vec, col)), self.config.zero) for col in cols
        ]

    def apply_col(self, vec) -> list:
        """This matrix times a column vector."""
        if len(vec) != self.ncols:
            raise ValueError("vector length mismatch")
        return [
            sum((a * v for a, v in zip(row, vec)), self.config.zero)
            for row in self.rows
        ]

    def is_nilpotent(self):
        """Least k <= n with A^k = 0, else None."""
        if not self.is_square():
            raise ValueError("nilpotency is defined for square matrices")
        power = Matrix.identity(self.nrows, self.config)
        for k in range(1, self.nrows + 1):
            power = power * self
            if power.is_zero():
                return k
        return None

    def __str__(self):
        return "[" + "; ".join(", ".join(str(e) for e in row) for row in self.rows) + "]"

    def __repr__(self):
        return f"<matrix {self.nrows}x{self.ncols} over Q(zeta_{self.config.m})>"


class RowReducer:
    """Incremental reduced row echelon form with generator bookkeeping.

    Vectors are inserted one generator at a time; each stored row carries
    the combination of inserted generators that produced it, so a
    successful reduction of a target vector yields an exact expression of
    the target in terms of the original generators.
    """

    def __init__(self, width: int, config: FieldConfig):
        self.width = width
        self.config = config
        self.rows = []  # (pivot, vector, {generator index: coeff})
        self.generators = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def pivots(self) -> tuple:
        return tuple(p for p, _, _ in self.rows)

    def reduce(self, vec):
        """(remainder, combo) without inserting; combo maps generator -> coeff."""
        rem = list(vec)
        combo = {}
        for pivot, row, row_combo in self.rows:
            c = rem[pivot]
            if c.is_zero():
                continue
            for i in range(pivot, self.width):
                if not row[i].is_zero():
                    rem[i] = rem[i] - c * row[i]
            for g, k in row_combo.items():
                acc = combo.get(g)
                upd = (acc + c * k) if acc is not None else c * k
                if upd.is_zero():
                    combo.pop(g, None)
                else:
                    combo[g] = upd
        return rem, combo

    def insert(self, vec) -> bool:
        """Add one generator; returns True when the rank grew."""
        gen = self.generators
        self.generators += 1
        rem, combo = self.reduce(vec)
        pivot = next((i for i, e in enumerate(rem) if not e.is_zero()), None)
        if pivot is None:
            return False
        # new row = generator - sum(combo): flip accumulated signs
        new_combo = {g: -k for g, k in combo.items()}
        new_combo[gen] = self.config.one
        inv = rem[pivot].inverse()
        new_row = [e * inv for e in rem]
        new_combo = {g: k * inv for g, k in new_combo.items()}
        # keep full reduction: clear this pivot from existing rows
        for idx, (p, row, rcombo) in enumerate(self.rows):
            c = row[pivot]
            if c.is_zero():
                continue
            row = [a - c * b for a, b in zip(row, new_row)]
            rcombo = dict(rcombo)
            for g, k in new_combo.items():
                acc = rcombo.get(g)
                upd = (acc - c * k) if acc is not None else -(c * k)
                if upd.is_zero():
                    rcombo.pop(g, None)
                else:
                    rcombo[g] = upd
            self.rows[idx] = (p, row, rcombo)
        self.rows.append((pivot, new_row, new_combo))
        self.rows.sort(key=lambda t: t[0])
        return True

    def contains(self, vec) -> bool:
        rem, _ = self.reduce(vec)
        return all(e.is_zero() for e in rem)

    def basis_vectors(self) -> list:
        return [row for _, row, _ in self.rows]
