"""
Exact integer matrices and the Smith normal form.

All arithmetic is on Python integers. A Smith decomposition records the
unimodular change-of-basis matrices and the inverse of the row transform, so
callers can move elements in and out of the diagonal coordinates without a
second elimination.
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import sympy

from .errors import ConsistencyError, ValidationError

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class IntMatrix:
    """Immutable dense integer matrix stored row-major."""
    rows: int
    cols: int
    data: Tuple[Tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValidationError("matrix dimensions must be non-negative",
                                  invariant="matrix-shape", witness=(self.rows, self.cols))
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValidationError("ragged matrix data", invariant="matrix-shape",
                                  witness=(self.rows, self.cols))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], rows: int) -> "IntMatrix":
        cols = [tuple(c) for c in columns]
        if any(len(c) != rows for c in cols):
            raise ValidationError("column length does not match row count",
                                  invariant="matrix-shape", witness=rows)
        data = tuple(tuple(c[i] for c in cols) for i in range(rows))
        return cls(rows, len(cols), data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, entries: Sequence[int], rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple(
            tuple(entries[i] if i == j and i < len(entries) else 0 for j in range(cols))
            for i in range(rows)))

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.data[i][j]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> Vector:
        return self.data[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.data)

    def columns(self) -> List[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def to_lists(self) -> List[List[int]]:
        return [list(r) for r in self.data]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(tuple(self.data[i][j] for i in range(self.rows)) for j in range(self.cols)))

    @property
    def T(self) -> "IntMatrix":
        return self.transpose()

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    def apply(self, vector: Sequence[int]) -> Vector:
        """Matrix-vector product."""
        if len(vector) != self.cols:
            raise ValidationError("vector length does not match column count",
                                  invariant="matrix-shape", witness=(len(vector), self.cols))
        return tuple(sum(x * vector[j] for j, x in _nonzero(r)) for r in self.data)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValidationError("incompatible matrix product",
                                  invariant="matrix-shape", witness=(self.shape, other.shape))
        result = []
        for r in self.data:
            row = [0] * other.cols
            for j, x in _nonzero(r):
                for c, y in enumerate(other.data[j]):
                    if y:
                        row[c] += x * y
            result.append(tuple(row))
        return IntMatrix(self.rows, other.cols, tuple(result))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValidationError("incompatible matrix sum",
                                  invariant="matrix-shape", witness=(self.shape, other.shape))
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(k * x for x in r) for r in self.data))

    def hstack(self, *others: "IntMatrix") -> "IntMatrix":
        result = [list(r) for r in self.data]
        cols = self.cols
        for other in others:
            if other.rows != self.rows:
                raise ValidationError("hstack row mismatch", invariant="matrix-shape",
                                      witness=(self.rows, other.rows))
            for i in range(self.rows):
                result[i].extend(other.data[i])
            cols += other.cols
        return IntMatrix.from_rows(result, cols)

    def vstack(self, *others: "IntMatrix") -> "IntMatrix":
        data = list(self.data)
        for other in others:
            if other.cols != self.cols:
                raise ValidationError("vstack column mismatch", invariant="matrix-shape",
                                      witness=(self.cols, other.cols))
            data.extend(other.data)
        return IntMatrix.from_rows(data, self.cols)

    def kron_identity(self, k: int) -> "IntMatrix":
        """M ⊗ I_k, with index (i, a) placed at i * k + a."""
        rows = []
        for r in self.data:
            for a in range(k):
                row = [0] * (self.cols * k)
                for j, x in enumerate(r):
                    if x:
                        row[j * k + a] = x
                rows.append(row)
        return IntMatrix.from_rows(rows, self.cols * k)

    def select_rows(self, indices: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_rows([self.data[i] for i in indices], self.cols)

    def select_columns(self, indices: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_rows([[r[j] for j in indices] for r in self.data], len(indices))

    def determinant(self) -> int:
        if self.rows != self.cols:
            raise ValidationError("determinant of a non-square matrix",
                                  invariant="matrix-shape", witness=self.shape)
        if self.rows == 0:
            return 1
        return int(sympy.Matrix(self.to_lists()).det())

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in r) for r in self.data)


def _nonzero(row: Sequence[int]) -> List[Tuple[int, int]]:
    return [(j, x) for j, x in enumerate(row) if x]


def block_diagonal(blocks: Sequence[IntMatrix]) -> IntMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    data = []
    offset = 0
    for b in blocks:
        for r in b.data:
            data.append((0,) * offset + r + (0,) * (cols - offset - b.cols))
        offset += b.cols
    return IntMatrix.from_rows(data, cols) if rows else IntMatrix.zeros(0, cols)


@dataclass(frozen=True)
class SmithDecomposition:
    """U · M · V = S with U, V unimodular and S diagonal, d_i | d_{i+1}."""
    matrix: IntMatrix
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix

    @property
    def diagonal(self) -> Tuple[int, ...]:
        return tuple(self.S[i, i] for i in range(min(self.S.rows, self.S.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)

    @property
    def invariant_factors(self) -> Tuple[int, ...]:
        return tuple(d for d in self.diagonal if d != 0)

    def verify(self, unimodular: bool = False) -> None:
        if self.U @ self.matrix @ self.V != self.S:
            raise ConsistencyError("Smith decomposition check U*M*V = S failed")
        if unimodular and self.U @ self.U_inv != IntMatrix.identity(self.U.rows):
            raise ConsistencyError("Smith decomposition U inverse is wrong")
        if unimodular and (abs(self.U.determinant()) != 1 or abs(self.V.determinant()) != 1):
            raise ConsistencyError("Smith decomposition transforms are not unimodular")

    def solve(self, b: Sequence[int]) -> Optional[Vector]:
        """An integer z with M z = b, or None if b is not in the column lattice."""
        if len(b) != self.matrix.rows:
            raise ValidationError("right-hand side has the wrong length",
                                  invariant="matrix-shape", witness=(len(b), self.matrix.rows))
        y = self.U.apply(b)
        diag = self.diagonal
        w = [0] * self.matrix.cols
        for i, value in enumerate(y):
            d = diag[i] if i < len(diag) else 0
            if d == 0:
                if value != 0:
                    return None
            else:
                if value % d:
                    return None
                w[i] = value // d
        return self.V.apply(w)

    def kernel_basis(self) -> List[Vector]:
        """Basis of the integer kernel {z : M z = 0}; it is saturated."""
        r = self.rank
        return [self.V.column(j) for j in range(r, self.matrix.cols)]

    def image_basis(self) -> List[Vector]:
        """Basis of the column lattice of M."""
        return [tuple(d * x for x in self.U_inv.column(i))
                for i, d in enumerate(self.diagonal) if d != 0]


def _min_pivot(a: List[List[int]], t: int, m: int, n: int) -> Optional[Tuple[int, int]]:
    best = None
    best_abs = 0
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            x = row[j]
            if x and (best is None or abs(x) < best_abs):
                best, best_abs = (i, j), abs(x)
    return best


def smith_normal_form(matrix: IntMatrix) -> SmithDecomposition:
    """Compute U, S, V with U · M · V = S.

    The pivot at each stage is the entry of least absolute value in the
    remaining submatrix, ties broken by the lowest (row, col). The product
    is checked exactly before returning.
    """
    m, n = matrix.rows, matrix.cols
    a = matrix.to_lists()
    u = IntMatrix.identity(m).to_lists()
    u_inv = IntMatrix.identity(m).to_lists()
    v = IntMatrix.identity(n).to_lists()

    def swap_rows(i, j):
        if i == j:
            return
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for r in u_inv:
            r[i], r[j] = r[j], r[i]

    def add_row(target, source, c):
        a[target] = [x + c * y for x, y in zip(a[target], a[source])]
        u[target] = [x + c * y for x, y in zip(u[target], u[source])]
        for r in u_inv:
            r[source] -= c * r[target]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]
        for r in u_inv:
            r[i] = -r[i]

    def swap_cols(i, j):
        if i == j:
            return
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_col(target, source, c):
        for r in a:
            r[target] += c * r[source]
        for r in v:
            r[target] += c * r[source]

    t = 0
    while t < min(m, n):
        pivot = _min_pivot(a, t, m, n)
        if pivot is None:
            break
        while True:
            i, j = pivot
            swap_rows(t, i)
            swap_cols(t, j)
            p = a[t][t]
            dirty = False
            for r in range(t + 1, m):
                if a[r][t]:
                    add_row(r, t, -(a[r][t] // p))
                    dirty = dirty or a[r][t] != 0
            for c in range(t + 1, n):
                if a[t][c]:
                    add_col(c, t, -(a[t][c] // p))
                    dirty = dirty or a[t][c] != 0
            if not dirty:
                offender = next((r for r in range(t + 1, m)
                                 if any(a[r][c] % p for c in range(t + 1, n))), None)
                if offender is None:
                    break
                add_row(t, offender, 1)
            pivot = _min_pivot(a, t, m, n)
        if a[t][t] < 0:
            negate_row(t)
        t += 1

    decomposition = SmithDecomposition(
        matrix=matrix,
        U=IntMatrix.from_rows(u, m),
        S=IntMatrix.from_rows(a, n),
        V=IntMatrix.from_rows(v, n),
        U_inv=IntMatrix.from_rows(u_inv, m),
    )
    decomposition.verify()
    logger.debug(f"Smith form of {m}x{n} matrix: rank {decomposition.rank}")
    return decomposition


def kernel_basis(matrix: IntMatrix) -> List[Vector]:
    return smith_normal_form(matrix).kernel_basis()


def solve(matrix: IntMatrix, b: Sequence[int]) -> Optional[Vector]:
    return smith_normal_form(matrix).solve(b)


def hermite_normal_form(matrix: IntMatrix) -> IntMatrix:
    """Row-style Hermite normal form of the row lattice of M.

    Nonzero rows only; pivots positive, entries above a pivot reduced into
    [0, pivot). Two matrices have the same result exactly when their rows
    span the same lattice.
    """
    a = matrix.to_lists()
    m, n = matrix.rows, matrix.cols
    r = 0
    for c in range(n):
        if r >= m:
            break
        found = False
        while True:
            nonzero = [i for i in range(r, m) if a[i][c] != 0]
            if not nonzero:
                break
            found = True
            k = min(nonzero, key=lambda i: (abs(a[i][c]), i))
            a[r], a[k] = a[k], a[r]
            clean = True
            for i in range(r + 1, m):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    clean = clean and a[i][c] == 0
            if clean:
                break
        if not found:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return IntMatrix.from_rows(a[:r], n)
