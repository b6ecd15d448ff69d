"""Exact integer, rational and mod-2 matrix arithmetic.

Everything here works on Python ``int`` and :class:`fractions.Fraction`, so no
value is ever rounded.  Matrices are small (at most 8x8) and immutable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]

MAX_DET_SIZE = 8


class DimensionError(ValueError):
    """Raised when matrix shapes do not fit the requested operation."""


def _canon(x: Scalar) -> Scalar:
    if type(x) is int:
        return x
    if type(x) is Fraction:
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, bool) or not isinstance(x, int):
        raise TypeError(f"matrix entries must be int or Fraction, got {type(x).__name__}")
    return x


@dataclass(frozen=True)
class Matrix:
    """Immutable dense matrix with exact entries (row-major)."""

    entries: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(_canon(x) for x in row) for row in self.entries)
        if not rows or not rows[0]:
            raise DimensionError("empty matrix")
        if any(len(r) != len(rows[0]) for r in rows):
            raise DimensionError("ragged rows")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def of(cls, rows: Iterable[Iterable[Scalar]]) -> "Matrix":
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        return cls(tuple((0,) * cols for _ in range(rows)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_integral(self) -> bool:
        return all(isinstance(x, int) for row in self.entries for x in row)

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return self.entries[i][j]

    def __iter__(self):
        return iter(self.entries)

    def tolist(self) -> list[list[Scalar]]:
        return [list(r) for r in self.entries]

    def column(self, j: int) -> tuple[Scalar, ...]:
        return tuple(r[j] for r in self.entries)

    @property
    def T(self) -> "Matrix":
        return Matrix(tuple(zip(*self.entries)))

    def block(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(tuple(tuple(self.entries[i][j] for j in cols) for i in rows))

    def trace(self) -> Scalar:
        if not self.is_square:
            raise DimensionError("trace of a non-square matrix")
        return sum(self.entries[i][i] for i in range(self.rows))

    def _check_same(self, other: "Matrix") -> None:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self, other)))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self, other)))

    def __neg__(self) -> "Matrix":
        return Matrix(tuple(tuple(-a for a in r) for r in self))

    def scale(self, c: Scalar) -> "Matrix":
        return Matrix(tuple(tuple(c * a for a in r) for r in self))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.entries))
        return Matrix(
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.entries)
        )

    def apply(self, v: Sequence[Scalar]) -> tuple[Scalar, ...]:
        if len(v) != self.cols:
            raise DimensionError("vector length does not match column count")
        return tuple(_canon(sum(a * b for a, b in zip(r, v))) for r in self.entries)

    def inverse(self) -> "Matrix":
        """Exact inverse over the rationals (Gauss-Jordan)."""
        if not self.is_square:
            raise DimensionError("inverse of a non-square matrix")
        n = self.rows
        aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
               for i, row in enumerate(self.entries)]
        for c in range(n):
            p = next((r for r in range(c, n) if aug[r][c] != 0), None)
            if p is None:
                raise ZeroDivisionError("matrix is singular")
            aug[c], aug[p] = aug[p], aug[c]
            piv = aug[c][c]
            aug[c] = [x / piv for x in aug[c]]
            for r in range(n):
                if r != c and aug[r][c] != 0:
                    f = aug[r][c]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
        return Matrix(tuple(tuple(row[n:]) for row in aug))

    def __pow__(self, k: int) -> "Matrix":
        if not self.is_square:
            raise DimensionError("power of a non-square matrix")
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = Matrix.identity(self.rows)
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self) + "]"


# Aliases naming the roles a matrix plays; all share the one implementation.
IntMatrix = RatMatrix = Mod2Matrix = Matrix
Mod2Vector = tuple


def det(m: Matrix) -> Scalar:
    """Determinant by fraction-free (Bareiss) elimination."""
    if not m.is_square:
        raise DimensionError(f"determinant of non-square {m.shape} matrix")
    n = m.rows
    if n > MAX_DET_SIZE:
        raise DimensionError(f"determinant limited to {MAX_DET_SIZE}x{MAX_DET_SIZE}")
    if not m.is_integral:
        # clear denominators, then rescale
        den = 1
        for row in m:
            for x in row:
                if isinstance(x, Fraction):
                    den = den * x.denominator // _gcd(den, x.denominator)
        return Fraction(det(m.scale(den)), den**n)
    a = [list(r) for r in m.entries]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def mod2(m: Matrix) -> Matrix:
    if not m.is_integral:
        raise TypeError("mod2 needs an integer matrix")
    return Matrix(tuple(tuple(x % 2 for x in r) for r in m))


def mod2_vector(v: Sequence[int]) -> tuple[int, ...]:
    return tuple(x % 2 for x in v)


def count_solutions_gf2(a: Matrix, b: Sequence[int]) -> int:
    """Number of x in (Z/2)^2 with a x = b over Z/2, by enumeration."""
    if a.shape != (2, 2) or len(b) != 2:
        raise DimensionError("count_solutions_gf2 expects a 2x2 matrix and a length-2 vector")
    target = mod2_vector(b)
    return sum(
        1 for x in itertools.product((0, 1), repeat=2) if mod2_vector(a.apply(x)) == target
    )


def gf2_rank(m: Matrix) -> int:
    rows = [[x % 2 for x in r] for r in m]
    rank, col = 0, 0
    for col in range(m.cols):
        p = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                rows[r] = [x ^ y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def has_eigenvalue_one(m: Matrix) -> bool:
    if not m.is_square:
        raise DimensionError("eigenvalue test on non-square matrix")
    return det(Matrix.identity(m.rows) - m) == 0


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def _column_echelon(a: Sequence[Sequence[int]], ncols: int):
    """Column-reduce ``a`` to lower echelon form ``h = a @ v`` with ``v`` unimodular.

    Returns (h, v, pivots) where pivots is a list of (row, col) pairs.
    """
    h = [list(r) for r in a]
    v = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def colop(c: int, j: int, s: int, t: int, u: int, w: int) -> None:
        # new col c = s*c + t*j ; new col j = u*c + w*j
        for mat in (h, v):
            for row in mat:
                x, y = row[c], row[j]
                row[c], row[j] = s * x + t * y, u * x + w * y

    pivots = []
    c = 0
    for i in range(len(h)):
        if c >= ncols:
            break
        for j in range(c + 1, ncols):
            if h[i][j] == 0:
                continue
            x, y = h[i][c], h[i][j]
            g, s, t = _egcd(x, y)
            colop(c, j, s, t, -y // g, x // g)
        if h[i][c] != 0:
            pivots.append((i, c))
            c += 1
    return h, v, pivots


def solve_integer_system(a: Sequence[Sequence[int]], b: Sequence[int]) -> tuple[int, ...] | None:
    """One integer solution x of ``a x = b``, or None if there is none."""
    if len(a) != len(b):
        raise DimensionError("row count of a must match length of b")
    if not a:
        return ()
    ncols = len(a[0])
    h, v, pivots = _column_echelon(a, ncols)
    y = [0] * ncols
    pivot_of_row = dict(pivots)
    for i, row in enumerate(h):
        s = b[i] - sum(row[j] * y[j] for j in range(ncols))
        if i in pivot_of_row:
            c = pivot_of_row[i]
            q, r = divmod(s, row[c])
            if r:
                return None
            y[c] = q
        elif s != 0:
            return None
    return tuple(sum(v[i][j] * y[j] for j in range(ncols)) for i in range(ncols))


def integer_kernel(a: Sequence[Sequence[int]], ncols: int) -> list[tuple[int, ...]]:
    """A basis of the integer kernel lattice of ``a`` (saturated, so primitive)."""
    if not a:
        return [tuple(int(i == j) for i in range(ncols)) for j in range(ncols)]
    h, v, pivots = _column_echelon(a, ncols)
    rank = len(pivots)
    return [tuple(v[i][j] for i in range(ncols)) for j in range(rank, ncols)]
