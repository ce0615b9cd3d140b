"""Exact dense linear algebra over Python integers and rationals.

Matrices wrap numpy object arrays holding ``int`` or ``fractions.Fraction``
entries, so every product, inverse and scaling is exact. No floating point
value ever enters this module.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral, Rational
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionError, SingularMatrixError

logger = logging.getLogger("sadic-builder")

Entry = Union[int, Fraction]


class _DenseMatrix:
    """Immutable dense matrix backed by a read-only numpy object array."""

    __slots__ = ("_data",)

    def __init__(self, rows: Union[Iterable[Iterable[Any]], "_DenseMatrix", np.ndarray]):
        if isinstance(rows, _DenseMatrix):
            rows = rows.tolist()
        elif isinstance(rows, np.ndarray):
            rows = rows.tolist()
        table = [list(row) for row in rows]
        if not table or not table[0]:
            raise DimensionError("a matrix needs at least one row and one column")
        width = len(table[0])
        if any(len(row) != width for row in table):
            raise DimensionError("ragged rows: every row must have the same length")
        data = np.empty((len(table), width), dtype=object)
        for i, row in enumerate(table):
            for j, value in enumerate(row):
                data[i, j] = self._coerce(value)
        data.flags.writeable = False
        self._data = data

    @classmethod
    def _coerce(cls, value: Any) -> Entry:
        raise NotImplementedError

    @classmethod
    def _from_array(cls, array: np.ndarray):
        """Wrap an object array without re-validating its shape."""
        matrix = cls.__new__(cls)
        data = np.empty(array.shape, dtype=object)
        for index, value in np.ndenumerate(array):
            data[index] = cls._coerce(value)
        data.flags.writeable = False
        matrix._data = data
        return matrix

    @property
    def shape(self) -> Tuple[int, int]:
        return self._data.shape

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def array(self) -> np.ndarray:
        """Read-only object array view of the entries."""
        return self._data

    def __getitem__(self, index: Tuple[int, int]) -> Entry:
        return self._data[index]

    def row(self, i: int) -> Tuple[Entry, ...]:
        return tuple(self._data[i, :])

    def column(self, j: int) -> Tuple[Entry, ...]:
        return tuple(self._data[:, j])

    def tolist(self) -> List[List[Entry]]:
        return [list(row) for row in self._data]

    def entries(self) -> Iterable[Entry]:
        return iter(self._data.flat)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def row_sums(self) -> Tuple[Entry, ...]:
        return tuple(sum(row) for row in self.tolist())

    def column_sums(self) -> Tuple[Entry, ...]:
        return tuple(sum(self._data[:, j]) for j in range(self.cols))

    def min_entry(self) -> Entry:
        return min(self.entries())

    def max_entry(self) -> Entry:
        return max(self.entries())

    def is_positive(self) -> bool:
        return all(x > 0 for x in self.entries())

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for x in self.entries())

    def transpose(self):
        return type(self)._from_array(self._data.T)

    def __matmul__(self, other: "_DenseMatrix"):
        return mat_mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, _DenseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.tolist() == other.tolist()

    def __hash__(self) -> int:
        return hash((self.shape, tuple(tuple(row) for row in self.tolist())))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self.tolist())
        return f"{type(self).__name__}([{body}])"


class ExactMatrix(_DenseMatrix):
    """Dense matrix of arbitrary-precision integers."""

    __slots__ = ()

    @classmethod
    def _coerce(cls, value: Any) -> int:
        if isinstance(value, bool):
            return int(value)
        if isinstance(value, Integral):
            return int(value)
        if isinstance(value, Rational):
            if value.denominator != 1:
                raise DimensionError(f"non-integer entry {value} in integer matrix")
            return int(value.numerator)
        if isinstance(value, str):
            return int(value.strip())
        raise TypeError(f"unsupported entry type {type(value).__name__} for an exact matrix")

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def column_vector(cls, values: Sequence[int]) -> "ExactMatrix":
        return cls([[v] for v in values])

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "ExactMatrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def scale(self, factor: int) -> "ExactMatrix":
        return ExactMatrix._from_array(self._data * int(factor))

    def to_rational(self) -> "RationalMatrix":
        return RationalMatrix._from_array(self._data)


class RationalMatrix(_DenseMatrix):
    """Dense matrix of exact rationals kept in lowest terms."""

    __slots__ = ()

    @classmethod
    def _coerce(cls, value: Any) -> Fraction:
        if isinstance(value, bool):
            return Fraction(int(value))
        if isinstance(value, (Integral, Rational)):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value.strip())
        raise TypeError(f"unsupported entry type {type(value).__name__} for a rational matrix")

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, values: Sequence[Any]) -> "RationalMatrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def scale(self, factor: Any) -> "RationalMatrix":
        return RationalMatrix._from_array(self._data * Fraction(factor))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.entries())

    def to_exact(self) -> ExactMatrix:
        if not self.is_integral():
            raise DimensionError("matrix has non-integer entries")
        return ExactMatrix._from_array(self._data)

    def to_rational(self) -> "RationalMatrix":
        return self


AnyMatrix = Union[ExactMatrix, RationalMatrix]


def as_rational(matrix: AnyMatrix) -> RationalMatrix:
    return matrix if isinstance(matrix, RationalMatrix) else matrix.to_rational()


def mat_mul(a: AnyMatrix, b: AnyMatrix) -> AnyMatrix:
    """Exact product; rational if either factor is rational."""
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    product = np.dot(a.array, b.array)
    if isinstance(a, RationalMatrix) or isinstance(b, RationalMatrix):
        return RationalMatrix._from_array(product)
    return ExactMatrix._from_array(product)


def mat_product(factors: Sequence[AnyMatrix]) -> AnyMatrix:
    """Left-to-right product ``factors[0] @ factors[1] @ ...``."""
    if not factors:
        raise DimensionError("empty product")
    result = factors[0]
    for factor in factors[1:]:
        result = mat_mul(result, factor)
    return result


@dataclass(frozen=True)
class ErsReport:
    flag: bool
    row_sum: Optional[Entry] = None


def is_ers(a: AnyMatrix) -> ErsReport:
    """Equal row sums check; the common sum is returned when it holds."""
    sums = set(a.row_sums())
    if len(sums) == 1:
        return ErsReport(True, sums.pop())
    return ErsReport(False, None)


def is_divisible(a: ExactMatrix, k: int) -> bool:
    if k < 1:
        raise ValueError("divisor must be positive")
    return all(x % k == 0 for x in a.entries())


def invert_rational(j: AnyMatrix) -> RationalMatrix:
    """Exact Gauss-Jordan inverse, pivoting on the first nonzero entry."""
    if not j.is_square():
        raise DimensionError(f"cannot invert a {j.rows}x{j.cols} matrix")
    n = j.rows
    x = np.array(as_rational(j).tolist(), dtype=object)
    y = np.array([[Fraction(int(r == c)) for c in range(n)] for r in range(n)], dtype=object)

    for i in range(n):
        for k in range(i, n):
            if x[k, i] != 0:
                if k != i:
                    x[[i, k]] = x[[k, i]]
                    y[[i, k]] = y[[k, i]]
                break
        else:
            raise SingularMatrixError("matrix is not invertible over the rationals")

        pivot = x[i, i]
        x[i, :] = x[i, :] / pivot
        y[i, :] = y[i, :] / pivot
        for k in range(n):
            if k != i and x[k, i] != 0:
                factor = x[k, i]
                y[k, :] = y[k, :] - factor * y[i, :]
                x[k, :] = x[k, :] - factor * x[i, :]

    inverse = RationalMatrix._from_array(y)
    identity = RationalMatrix.identity(n)
    if mat_mul(j, inverse) != identity or mat_mul(inverse, j) != identity:
        raise SingularMatrixError("elimination did not produce an exact inverse")
    return inverse


def lcm_denominators(m: AnyMatrix) -> int:
    """Least positive s with s*M integral."""
    if isinstance(m, ExactMatrix):
        return 1
    return math.lcm(*(x.denominator for x in m.entries()))


def ones_column(n: int) -> ExactMatrix:
    return ExactMatrix.column_vector([1] * n)
