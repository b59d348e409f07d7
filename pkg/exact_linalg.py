"""Exact rational vectors, matrices and skew-symmetric trilinear tables.

Every scalar is a ``fractions.Fraction``. Matrices wrap an object-dtype numpy
array of Fractions and follow the column convention used across the package:
column ``j`` holds the image of basis vector ``j``. Row reduction is delegated
to sympy's ``DomainMatrix`` over ``QQ``.
"""
import logging
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from errors import InputError

logger = logging.getLogger(__name__)

Vector = Tuple[Fraction, ...]
ScalarLike = Union[int, Fraction, str]
Triple = Tuple[int, int, int]

ZERO = Fraction(0)
ONE = Fraction(1)


# -------------------------------------------------------------------------
# Scalars and vectors
# -------------------------------------------------------------------------
def to_scalar(value) -> Fraction:
    """Coerce an exact value to Fraction; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(f"Refusing inexact scalar {value!r}")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"Not a rational literal: {value!r}") from e
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise InputError(f"Not an exact rational: {value!r}")


def vector(values: Iterable[ScalarLike]) -> Vector:
    return tuple(to_scalar(x) for x in values)


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


def basis_vector(n: int, i: int) -> Vector:
    if not 0 <= i < n:
        raise InputError(f"Basis index {i} out of range for dimension {n}")
    return tuple(ONE if k == i else ZERO for k in range(n))


def _check_lengths(u: Sequence, v: Sequence) -> None:
    if len(u) != len(v):
        raise InputError(f"Vector length mismatch: {len(u)} vs {len(v)}")


def vec_add(u: Vector, v: Vector) -> Vector:
    _check_lengths(u, v)
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Vector, v: Vector) -> Vector:
    _check_lengths(u, v)
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c: Fraction, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def vec_neg(v: Vector) -> Vector:
    return tuple(-a for a in v)


def vec_is_zero(v: Sequence[Fraction]) -> bool:
    return all(a == 0 for a in v)


def vec_sum(vectors: Iterable[Vector], n: int) -> Vector:
    total = [ZERO] * n
    for v in vectors:
        _check_lengths(total, v)
        for k, a in enumerate(v):
            if a:
                total[k] += a
    return tuple(total)


def vec_accumulate(total: List[Fraction], coefficient: Fraction, v: Sequence[Fraction]) -> None:
    """total += coefficient * v, in place."""
    if not coefficient:
        return
    for k, a in enumerate(v):
        if a:
            total[k] += coefficient * a


def nonzero_items(v: Sequence[Fraction]) -> Iterator[Tuple[int, Fraction]]:
    return ((k, a) for k, a in enumerate(v) if a)


def format_vector(v: Sequence[Fraction]) -> List[str]:
    return [str(a) for a in v]


# -------------------------------------------------------------------------
# Permutation signs
# -------------------------------------------------------------------------
def permutation_sign(indices: Sequence[int]) -> int:
    """(-1)^inversions, or 0 if an index repeats."""
    if len(set(indices)) != len(indices):
        return 0
    inversions = sum(1 for a, b in combinations(indices, 2) if a > b)
    return -1 if inversions % 2 else 1


def canonical_pair(s: int, t: int) -> Tuple[int, Tuple[int, int]]:
    """Sign and sorted key of a basis pair s^t."""
    if s == t:
        return 0, (s, t)
    if s < t:
        return 1, (s, t)
    return -1, (t, s)


def canonical_pairs(n: int) -> List[Tuple[int, int]]:
    return list(combinations(range(n), 2))


# -------------------------------------------------------------------------
# Matrices
# -------------------------------------------------------------------------
class Matrix:
    """Immutable exact matrix, column j = image of basis vector j."""

    __slots__ = ("_data",)

    def __init__(self, rows: Sequence[Sequence[ScalarLike]], cols: Optional[int] = None):
        rows = [list(row) for row in rows]
        width = len(rows[0]) if rows else (cols or 0)
        if cols is not None and cols != width:
            raise InputError(f"Declared {cols} columns but rows have {width}")
        if any(len(row) != width for row in rows):
            raise InputError("Ragged matrix rows")
        data = np.empty((len(rows), width), dtype=object)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                data[i, j] = to_scalar(x)
        data.flags.writeable = False
        self._data = data

    @classmethod
    def _wrap(cls, array: np.ndarray) -> "Matrix":
        m = cls.__new__(cls)
        data = np.empty(array.shape, dtype=object)
        for index, x in np.ndenumerate(array):
            data[index] = to_scalar(x)
        data.flags.writeable = False
        m._data = data
        return m

    # construction helpers
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls([[ZERO] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def diagonal(cls, values: Sequence[ScalarLike]) -> "Matrix":
        n = len(values)
        return cls([[values[i] if i == j else ZERO for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[ScalarLike]], rows: Optional[int] = None) -> "Matrix":
        height = len(columns[0]) if columns else (rows or 0)
        if rows is not None and rows != height:
            raise InputError(f"Declared {rows} rows but columns have {height}")
        if any(len(col) != height for col in columns):
            raise InputError("Ragged matrix columns")
        return cls([[columns[j][i] for j in range(len(columns))] for i in range(height)], cols=len(columns))

    # shape and access
    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def entry(self, i: int, j: int) -> Fraction:
        return self._data[i, j]

    def column(self, j: int) -> Vector:
        return tuple(self._data[:, j])

    def row(self, i: int) -> Vector:
        return tuple(self._data[i, :])

    def to_rows(self) -> List[List[Fraction]]:
        return [list(self._data[i, :]) for i in range(self.rows)]

    def submatrix(self, row_start: int, row_stop: int, col_start: int, col_stop: int) -> "Matrix":
        return Matrix._wrap(self._data[row_start:row_stop, col_start:col_stop])

    # arithmetic
    def __matmul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise InputError(f"Cannot compose {self.shape} with {other.shape}")
        if self.cols == 0:
            return Matrix.zeros(self.rows, other.cols)
        return Matrix._wrap(self._data.dot(other._data))

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise InputError(f"Cannot add {self.shape} and {other.shape}")
        return Matrix._wrap(self._data + other._data)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise InputError(f"Cannot subtract {other.shape} from {self.shape}")
        return Matrix._wrap(self._data - other._data)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap(-self._data)

    def scale(self, c: ScalarLike) -> "Matrix":
        return Matrix._wrap(self._data * to_scalar(c))

    def transpose(self) -> "Matrix":
        return Matrix._wrap(self._data.T)

    def apply(self, v: Sequence[Fraction]) -> Vector:
        return mat_apply(self, v)

    def power(self, k: int) -> "Matrix":
        if not self.is_square():
            raise InputError(f"Power of non-square matrix {self.shape}")
        if k < 0:
            raise InputError("Negative matrix powers are not supported")
        result = Matrix.identity(self.rows)
        for _ in range(k):
            result = self @ result
        return result

    def direct_sum(self, other: "Matrix") -> "Matrix":
        rows = [list(r) + [ZERO] * other.cols for r in self.to_rows()]
        rows += [[ZERO] * self.cols + list(r) for r in other.to_rows()]
        return Matrix(rows, cols=self.cols + other.cols)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self._data.flat)

    def is_identity(self) -> bool:
        return self.is_square() and self == Matrix.identity(self.rows)

    def is_invertible(self) -> bool:
        return self.is_square() and rank(self) == self.rows

    def inverse(self) -> "Matrix":
        if not self.is_invertible():
            raise InputError(f"Matrix {self.shape} is singular")
        n = self.rows
        augmented = Matrix([list(r) + list(e) for r, e in zip(self.to_rows(), Matrix.identity(n).to_rows())])
        reduced, _ = rref(augmented)
        return Matrix([row[n:] for row in reduced], cols=n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(a == b for a, b in zip(self._data.flat, other._data.flat))

    def __hash__(self) -> int:
        return hash((self.shape, tuple(self._data.flat)))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in row) for row in self.to_rows())
        return f"Matrix({self.rows}x{self.cols}: [{body}])"


def mat_apply(m: Matrix, v: Sequence[Fraction]) -> Vector:
    """m·v with exact arithmetic; len(v) must equal m.cols."""
    if len(v) != m.cols:
        raise InputError(f"Cannot apply {m.rows}x{m.cols} matrix to vector of length {len(v)}")
    result = [ZERO] * m.rows
    for j, a in enumerate(v):
        if a:
            a = to_scalar(a)
            for i in range(m.rows):
                entry = m.entry(i, j)
                if entry:
                    result[i] += entry * a
    return tuple(result)


# -------------------------------------------------------------------------
# Row reduction
# -------------------------------------------------------------------------
def _to_domain_matrix(m: Matrix) -> DomainMatrix:
    rows = [[QQ(int(x.numerator), int(x.denominator)) for x in row] for row in m.to_rows()]
    return DomainMatrix(rows, m.shape, QQ)


def _from_sympy(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def rref(m: Matrix) -> Tuple[List[List[Fraction]], Tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    if m.rows == 0 or m.cols == 0:
        return m.to_rows(), ()
    reduced, pivots = _to_domain_matrix(m).rref()
    table = reduced.to_Matrix()
    rows = [[_from_sympy(table[i, j]) for j in range(m.cols)] for i in range(m.rows)]
    return rows, tuple(int(p) for p in pivots)


def rank(m: Matrix) -> int:
    return len(rref(m)[1])


def nullspace(m: Matrix) -> List[Vector]:
    """Canonical kernel basis: each free column set to 1 in turn."""
    if m.cols == 0:
        return []
    reduced, pivots = rref(m)
    free = [j for j in range(m.cols) if j not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for row_index, p in enumerate(pivots):
            v[p] = -reduced[row_index][f]
        basis.append(tuple(v))
    logger.debug("nullspace: %sx%s matrix, rank %d, kernel %d", m.rows, m.cols, len(pivots), len(basis))
    return basis


def matrix_from_rows(rows: Sequence[Sequence[Fraction]], cols: int) -> Matrix:
    return Matrix(rows, cols=cols)


# -------------------------------------------------------------------------
# Skew-symmetric trilinear tables
# -------------------------------------------------------------------------
class SkewTensor3:
    """Structure constants of a trilinear skew map, stored on i<j<k.

    ``value_dim`` is the length of the stored coefficient vectors; it equals
    ``dim`` for brackets and the carrier dimension for V-valued tables (ω).
    """

    __slots__ = ("dim", "value_dim", "_cells")

    def __init__(self, dim: int, cells: Optional[Dict[Triple, Sequence[ScalarLike]]] = None, value_dim: Optional[int] = None):
        self.dim = dim
        self.value_dim = dim if value_dim is None else value_dim
        stored: Dict[Triple, Vector] = {}
        for key, value in (cells or {}).items():
            i, j, k = key
            for index in key:
                if not 0 <= index < dim:
                    raise InputError(f"Index {index} out of range for dimension {dim}")
            value = vector(value)
            if len(value) != self.value_dim:
                raise InputError(f"Cell {key} has length {len(value)}, expected {self.value_dim}")
            sign = permutation_sign(key)
            if sign == 0:
                if not vec_is_zero(value):
                    raise InputError(f"Nonzero value at repeated-index cell {key}")
                continue
            canonical = tuple(sorted(key))
            signed = value if sign > 0 else vec_neg(value)
            if canonical in stored and stored[canonical] != signed:
                raise InputError(f"Conflicting values for cell {canonical}")
            if not vec_is_zero(signed):
                stored[canonical] = signed
        self._cells = stored

    @classmethod
    def zero(cls, dim: int, value_dim: Optional[int] = None) -> "SkewTensor3":
        return cls(dim, {}, value_dim)

    @property
    def cells(self) -> Dict[Triple, Vector]:
        return dict(self._cells)

    def items(self):
        return sorted(self._cells.items())

    def lookup(self, i: int, j: int, k: int) -> Vector:
        return skew_lookup(self, i, j, k)

    def evaluate(self, u: Sequence[Fraction], v: Sequence[Fraction], w: Sequence[Fraction]) -> Vector:
        """Trilinear extension: sum of cell values times 3x3 minors of [u v w]."""
        total = [ZERO] * self.value_dim
        for (i, j, k), value in self._cells.items():
            coefficient = (
                u[i] * (v[j] * w[k] - v[k] * w[j])
                - u[j] * (v[i] * w[k] - v[k] * w[i])
                + u[k] * (v[i] * w[j] - v[j] * w[i])
            )
            vec_accumulate(total, coefficient, value)
        return tuple(total)

    def map_values(self, m: Matrix) -> "SkewTensor3":
        """Compose every value with m (e.g. α∘bracket)."""
        return SkewTensor3(self.dim, {key: mat_apply(m, value) for key, value in self._cells.items()}, m.rows)

    def is_zero(self) -> bool:
        return not self._cells

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkewTensor3):
            return NotImplemented
        return (self.dim, self.value_dim, self._cells) == (other.dim, other.value_dim, other._cells)

    def __hash__(self) -> int:
        return hash((self.dim, self.value_dim, tuple(sorted(self._cells.items()))))

    def __repr__(self) -> str:
        return f"SkewTensor3(dim={self.dim}, cells={dict(sorted(self._cells.items()))})"


def skew_lookup(t: SkewTensor3, i: int, j: int, k: int) -> Vector:
    """Sign-extended cell lookup: zero on repeats, sign of the sorting permutation otherwise."""
    for index in (i, j, k):
        if not 0 <= index < t.dim:
            raise InputError(f"Index {index} out of range for dimension {t.dim}")
    sign = permutation_sign((i, j, k))
    if sign == 0:
        return zero_vector(t.value_dim)
    value = t._cells.get(tuple(sorted((i, j, k))))
    if value is None:
        return zero_vector(t.value_dim)
    return value if sign > 0 else vec_neg(value)
