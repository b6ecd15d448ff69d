"""Normal forms for torsion-free nilpotent groups of rank 3 or 4 and class at most 2.

An element is stored as its exponent vector ``(a1, ..., ar)`` meaning
``e1^a1 e2^a2 ... er^ar``.  ``e1`` is central; the other generators commute up to
powers of ``e1``:

    ej^c ei^b = e1^(kappa(j, i) * b * c) ei^b ej^c        (j > i >= 2)

The sign of ``kappa`` is the one for which the affine representation
:func:`lambda_rep` is a homomorphism, i.e. ``ej ei ej^-1 ei^-1 = e1^kappa``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .linalg import Matrix, integer_kernel

NilElement = tuple[int, ...]


class RankMismatch(ValueError):
    pass


@dataclass(frozen=True)
class NilParams:
    """Rank plus commutator exponents.

    ``l`` is ``(l1,)`` for rank 3 and ``(l1, l2, l3)`` for rank 4, where
    ``[e3,e2] = e1^l1``, ``[e4,e2] = e1^l2`` and ``[e4,e3] = e1^l3``.
    """

    rank: int
    l: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "l", tuple(int(x) for x in self.l))
        if self.rank == 3:
            if len(self.l) != 1:
                raise ValueError("rank 3 takes one commutator parameter")
        elif self.rank == 4:
            if len(self.l) != 3:
                raise ValueError("rank 4 takes three commutator parameters")
        else:
            raise ValueError("rank must be 3 or 4")

    @classmethod
    def rank3(cls, l1: int) -> "NilParams":
        return cls(3, (l1,))

    @classmethod
    def rank4(cls, l1: int, l2: int, l3: int) -> "NilParams":
        return cls(4, (l1, l2, l3))

    @cached_property
    def kappa(self) -> dict[tuple[int, int], int]:
        """Map (j, i) with j > i >= 1 (0-based generator indices) to the e1 exponent."""
        if self.rank == 3:
            return {(2, 1): self.l[0]}
        l1, l2, l3 = self.l
        return {(2, 1): l1, (3, 1): l2, (3, 2): l3}

    @cached_property
    def triples(self) -> tuple[tuple[int, int, int], ...]:
        return tuple((j, i, k) for (j, i), k in self.kappa.items() if k)

    @cached_property
    def identity(self) -> NilElement:
        return (0,) * self.rank

    def generator(self, i: int) -> NilElement:
        """``e_{i+1}`` (0-based index)."""
        return tuple(int(j == i) for j in range(self.rank))

    @cached_property
    def generators(self) -> tuple[NilElement, ...]:
        return tuple(self.generator(i) for i in range(self.rank))

    @cached_property
    def _generator_matrices(self) -> tuple[Matrix, ...]:
        r = self.rank
        half = {(j, i): Fraction(k, 2) for (j, i), k in self.kappa.items()}
        mats = []
        for g in range(r):
            rows = [[int(a == b) for b in range(r + 1)] for a in range(r + 1)]
            rows[g][r] = 1
            if g >= 1:
                for (j, i), h in half.items():
                    if g == j:
                        rows[0][i] = h
                    elif g == i:
                        rows[0][j] = -h
            mats.append(Matrix.of(rows))
        return tuple(mats)

    def __str__(self) -> str:
        return f"N(rank={self.rank}, l={self.l})"


def _check(p: NilParams, *xs: NilElement) -> None:
    for x in xs:
        if len(x) != p.rank:
            raise RankMismatch(f"element {x} does not have rank {p.rank}")


def _twist(p: NilParams, x: NilElement, y: NilElement) -> int:
    """e1 exponent picked up when y's generators are collected past x's."""
    t = 0
    for j, i, k in p.triples:
        t += k * x[j] * y[i]
    return t


def nil_multiply(p: NilParams, x: NilElement, y: NilElement) -> NilElement:
    _check(p, x, y)
    return _mul(p, x, y)


def _mul(p: NilParams, x: NilElement, y: NilElement) -> NilElement:
    t = x[0] + y[0]
    for j, i, k in p.triples:
        t += k * x[j] * y[i]
    if len(x) == 3:
        return (t, x[1] + y[1], x[2] + y[2])
    return (t, x[1] + y[1], x[2] + y[2], x[3] + y[3])


def nil_inverse(p: NilParams, x: NilElement) -> NilElement:
    _check(p, x)
    return (-x[0] + _twist(p, x, x),) + tuple(-a for a in x[1:])


def nil_power(p: NilParams, x: NilElement, n: int) -> NilElement:
    # x^n = e1^(n a1 + C(n,2) q) * (n a2, ..., n ar) with q the self-twist; valid for all n in Z
    _check(p, x)
    q = _twist(p, x, x)
    return (n * x[0] + n * (n - 1) // 2 * q,) + tuple(n * a for a in x[1:])


def nil_commutator(p: NilParams, x: NilElement, y: NilElement) -> NilElement:
    """``x y x^-1 y^-1`` (always a power of e1)."""
    return nil_multiply(p, nil_multiply(p, x, y), nil_inverse(p, nil_multiply(p, y, x)))


def commutator_form(p: NilParams, u, v) -> int:
    """e1 exponent of ``[u, v]`` from the abelianised coordinates u, v (length rank-1)."""
    return sum(k * (u[j - 1] * v[i - 1] - u[i - 1] * v[j - 1]) for (j, i), k in p.kappa.items())


def lambda_rep(p: NilParams, x: NilElement) -> Matrix:
    """Image under the faithful affine representation, as an (r+1)x(r+1) matrix."""
    _check(p, x)
    n = p.rank + 1
    result = Matrix.identity(n)
    eye = result
    for g, a in zip(p._generator_matrices, x):
        if a:
            # g = 1 + N with N^2 = 0, so g^a = 1 + aN
            result = result @ (eye + (g - eye).scale(a))
    return result


def from_lambda(p: NilParams, m: Matrix) -> NilElement:
    """Inverse of :func:`lambda_rep`; raises ValueError if ``m`` is not in the image."""
    r = p.rank
    if m.shape != (r + 1, r + 1):
        raise ValueError("matrix has the wrong size")
    tail = [m[i, r] for i in range(1, r)]
    if any(not isinstance(t, int) for t in tail):
        raise ValueError("not the image of a lattice element")
    base = lambda_rep(p, (0, *tail))
    a1 = Fraction(m[0, r] - base[0, r])
    if a1.denominator != 1:
        raise ValueError("not the image of a lattice element")
    x = (a1.numerator, *tail)
    if lambda_rep(p, x) != m:
        raise ValueError("not the image of a lattice element")
    return x


def center_basis(p: NilParams) -> list[NilElement]:
    """Generators of the centre: e1 plus a basis of the kernel of the commutator form."""
    n = p.rank - 1
    form = [[commutator_form(p, _unit(n, a), _unit(n, b)) for b in range(n)] for a in range(n)]
    kernel = integer_kernel(form, n)
    basis = [p.generator(0)]
    for v in kernel:
        v = _normalise_sign(v)
        basis.append((0, *v))
    return sorted(basis[:1]) + sorted(basis[1:], reverse=True)


def _unit(n: int, i: int) -> tuple[int, ...]:
    return tuple(int(j == i) for j in range(n))


def _normalise_sign(v: tuple[int, ...]) -> tuple[int, ...]:
    lead = next((x for x in v if x), 0)
    return tuple(-x for x in v) if lead < 0 else v


def isolator_quotient(x: NilElement) -> tuple[int, ...]:
    """Coordinates in N / <e1>, a free abelian group."""
    return tuple(x[1:])
