"""Almost-crystallographic groups: a class-2 lattice N extended by a cyclic holonomy generator.

Elements are kept in the normal form ``n * alpha^eps`` with ``0 <= eps < |F|``.
Each family is described by the conjugation action of ``alpha`` on the
generators of N, the value of ``alpha^|F|`` in N, and the affine matrix
``lambda(alpha)``.  The first two drive the arithmetic; the matrix is only used
for the representation and the holonomy, and the test-suite checks the two
descriptions agree.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence

from .linalg import Matrix
from .nilgroup import (
    NilElement,
    NilParams,
    lambda_rep,
    nil_inverse,
    nil_power,
    _mul,
)


class Family(enum.Enum):
    D3F1 = "d3f1"
    D3F2 = "d3f2"
    D4F2 = "d4f2"
    D4F3 = "d4f3"
    D4F4 = "d4f4"
    D4F5 = "d4f5"
    D4F143 = "d4f143"
    D4F146 = "d4f146"

    @classmethod
    def parse(cls, name: str) -> "Family":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown family {name!r}; choose from "
                             + ", ".join(f.value for f in cls)) from None


PARAM_COUNT = {
    Family.D3F1: 1,
    Family.D3F2: 4,
    Family.D4F2: 7,
    Family.D4F3: 4,
    Family.D4F4: 4,
    Family.D4F5: 4,
    Family.D4F143: 4,
    Family.D4F146: 4,
}

# (mu, nu) for the families sharing one presentation
_MU_NU = {Family.D4F3: (0, 0), Family.D4F4: (1, 0), Family.D4F5: (0, 1)}
_MU_TRIGONAL = {Family.D4F143: 0, Family.D4F146: 1}


class SpecMismatch(ValueError):
    pass


class NotAdmissible(ValueError):
    """The requested finite quotient is not a well-defined quotient group."""


class ACElement(NamedTuple):
    nil: NilElement
    eps: int = 0


Word = list[tuple[int, int]]  # (generator index, exponent); index rank means alpha


@dataclass(frozen=True)
class ACGroupSpec:
    family: Family
    params: tuple[int, ...]

    def __post_init__(self):
        fam = Family.parse(self.family) if isinstance(self.family, str) else self.family
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "params", tuple(int(k) for k in self.params))
        if len(self.params) != PARAM_COUNT[fam]:
            raise ValueError(f"{fam.value} takes {PARAM_COUNT[fam]} parameters, "
                             f"got {len(self.params)}")

    # -- structure -----------------------------------------------------

    @cached_property
    def nil(self) -> NilParams:
        f, k = self.family, self.params
        if f is Family.D3F1:
            return NilParams.rank3(k[0])
        if f is Family.D3F2:
            return NilParams.rank3(k[0])
        if f is Family.D4F2:
            return NilParams.rank4(k[0], k[1], k[2])
        return NilParams.rank4(0, 0, k[0])

    @property
    def rank(self) -> int:
        return self.nil.rank

    @cached_property
    def order(self) -> int:
        """Order of the holonomy group F (the order of alpha modulo N)."""
        if self.family is Family.D3F1:
            return 1
        if self.family in _MU_TRIGONAL:
            return 3
        return 2

    @cached_property
    def alpha_action(self) -> tuple[NilElement, ...]:
        """``alpha e_i alpha^-1`` for each generator e_i of N."""
        f, k = self.family, self.params
        if f is Family.D3F1:
            return self.nil.generators
        if f is Family.D3F2:
            return ((1, 0, 0), (k[1], -1, 0), (k[2], 0, -1))
        if f is Family.D4F2:
            return ((1, 0, 0, 0), (k[3], -1, 0, 0), (k[4], 0, -1, 0), (k[5], 0, 0, -1))
        if f in _MU_NU:
            _, nu = _MU_NU[f]
            return ((1, 0, 0, 0), (0, 1, 0, 0), (k[1], -nu, -1, 0), (k[2], 0, 0, -1))
        mu = _MU_TRIGONAL[f]
        # alpha rotates e3 -> e4 -> e3^-1 e4^-1 modulo the centre
        return ((1, 0, 0, 0), (0, 1, 0, 0), (k[1], 0, 0, 1), (k[2], mu, -1, -1))

    @cached_property
    def alpha_power(self) -> NilElement:
        """``alpha^|F|`` as an element of N."""
        f, k = self.family, self.params
        if f is Family.D3F1:
            return self.nil.identity
        if f is Family.D3F2:
            return (k[3], 0, 0)
        if f is Family.D4F2:
            return (k[6], 0, 0, 0)
        if f in _MU_NU:
            mu, _ = _MU_NU[f]
            return (k[3], mu, 0, 0)
        return (k[3], 0, 0, 0)

    @cached_property
    def lambda_alpha(self) -> Matrix:
        f, k = self.family, self.params
        h = Fraction(1, 2)
        if f is Family.D3F1:
            return Matrix.identity(4)
        if f is Family.D3F2:
            return Matrix.of([[1, k[1], k[2], k[3] * h],
                              [0, -1, 0, 0],
                              [0, 0, -1, 0],
                              [0, 0, 0, 1]])
        if f is Family.D4F2:
            return Matrix.of([[1, k[3], k[4], k[5], k[6] * h],
                              [0, -1, 0, 0, 0],
                              [0, 0, -1, 0, 0],
                              [0, 0, 0, -1, 0],
                              [0, 0, 0, 0, 1]])
        if f in _MU_NU:
            mu, nu = _MU_NU[f]
            return Matrix.of([[1, 0, k[1], k[2], k[3] * h],
                              [0, 1, -nu, 0, mu * h],
                              [0, 0, -1, 0, 0],
                              [0, 0, 0, -1, 0],
                              [0, 0, 0, 0, 1]])
        mu = _MU_TRIGONAL[f]
        return Matrix.of([[1, 0, k[1], -k[0] * h + k[2], Fraction(k[3], 3)],
                          [0, 1, 0, mu, 0],
                          [0, 0, 0, -1, 0],
                          [0, 0, 1, -1, 0],
                          [0, 0, 0, 0, 1]])

    @cached_property
    def identity(self) -> ACElement:
        return ACElement(self.nil.identity, 0)

    @cached_property
    def generators(self) -> tuple[ACElement, ...]:
        """e_1, ..., e_r followed by alpha (when F is non-trivial)."""
        gens = [ACElement(g, 0) for g in self.nil.generators]
        if self.order > 1:
            gens.append(ACElement(self.nil.identity, 1))
        return tuple(gens)

    def relations(self) -> list[tuple[str, Word, Word]]:
        """Defining relations as (name, lhs word, rhs word)."""
        r = self.rank
        rels: list[tuple[str, Word, Word]] = []
        for i, j in itertools.combinations(range(r), 2):
            k = self.nil.kappa.get((j, i), 0)
            lhs = [(j, 1), (i, 1)]
            rhs = ([(0, k)] if k else []) + [(i, 1), (j, 1)]
            rels.append((f"[e{j + 1},e{i + 1}]", lhs, rhs))
        if self.order > 1:
            for i, w in enumerate(self.alpha_action):
                rels.append((f"alpha e{i + 1}", [(r, 1), (i, 1)], nil_word(w) + [(r, 1)]))
            rels.append((f"alpha^{self.order}", [(r, self.order)], nil_word(self.alpha_power)))
        return rels

    def __str__(self) -> str:
        return f"{self.family.value}{self.params}"


def nil_word(n: NilElement) -> Word:
    return [(i, a) for i, a in enumerate(n) if a]


def _check(spec: ACGroupSpec, *xs: ACElement) -> None:
    for x in xs:
        if len(x.nil) != spec.rank or not 0 <= x.eps < spec.order:
            raise SpecMismatch(f"{x} is not a normal form for {spec}")


def conjugate_by_alpha(spec: ACGroupSpec, n: NilElement, times: int = 1) -> NilElement:
    """``alpha^times n alpha^-times`` for times >= 0."""
    p = spec.nil
    action = spec.alpha_action
    for _ in range(times):
        out = p.identity
        for w, a in zip(action, n):
            if a:
                out = _mul(p, out, nil_power(p, w, a))
        n = out
    return n


def ac_multiply(spec: ACGroupSpec, x: ACElement, y: ACElement) -> ACElement:
    _check(spec, x, y)
    p = spec.nil
    yn = conjugate_by_alpha(spec, y.nil, x.eps) if x.eps else y.nil
    n = _mul(p, x.nil, yn)
    e = x.eps + y.eps
    if e >= spec.order:
        n = _mul(p, n, spec.alpha_power)
        e -= spec.order
    return ACElement(n, e)


def ac_inverse(spec: ACGroupSpec, x: ACElement) -> ACElement:
    _check(spec, x)
    p = spec.nil
    ninv = ACElement(nil_inverse(p, x.nil), 0)
    if x.eps == 0:
        return ninv
    # alpha^-eps = alpha^(|F|-eps) * (alpha^|F|)^-1, the latter central in <alpha>
    a = ACElement(nil_inverse(p, spec.alpha_power), spec.order - x.eps)
    return ac_multiply(spec, a, ninv)


def ac_power(spec: ACGroupSpec, x: ACElement, n: int) -> ACElement:
    base = x if n >= 0 else ac_inverse(spec, x)
    n = abs(n)
    result = spec.identity
    while n:
        if n & 1:
            result = ac_multiply(spec, result, base)
        base = ac_multiply(spec, base, base)
        n >>= 1
    return result


def evaluate_word(spec: ACGroupSpec, images: Sequence[ACElement], word: Word) -> ACElement:
    out = spec.identity
    for g, e in word:
        out = ac_multiply(spec, out, ac_power(spec, images[g], e))
    return out


def ac_lambda(spec: ACGroupSpec, x: ACElement) -> Matrix:
    _check(spec, x)
    return lambda_rep(spec.nil, x.nil) @ (spec.lambda_alpha**x.eps)


@dataclass(frozen=True)
class HolonomyRep:
    """The linear parts A_* of alpha^eps, eps = 0 .. |F|-1."""

    matrices: tuple[tuple[int, Matrix], ...]

    def __iter__(self):
        return iter(self.matrices)

    def __len__(self):
        return len(self.matrices)

    @property
    def order(self) -> int:
        return len(self.matrices)

    @property
    def dimension(self) -> int:
        return self.matrices[0][1].rows


def holonomy(spec: ACGroupSpec) -> HolonomyRep:
    r = spec.rank
    idx = range(r)
    mats = []
    for eps in range(spec.order):
        # rational in the e1 row for the trigonal families; that row never
        # affects det(1 - A_* D_*)
        mats.append((eps, (spec.lambda_alpha**eps).block(idx, idx)))
    return HolonomyRep(tuple(mats))


def project_to_quotient(spec: ACGroupSpec, x: ACElement) -> tuple[tuple[int, ...], int]:
    """Image in the crystallographic quotient by <e1>."""
    _check(spec, x)
    return tuple(x.nil[1:]), x.eps


def random_element(spec: ACGroupSpec, rng: random.Random, bound: int = 5) -> ACElement:
    return ACElement(tuple(rng.randint(-bound, bound) for _ in range(spec.rank)),
                     rng.randrange(spec.order))


class FiniteQuotient:
    """The quotient of Gamma by K = <e_i^(m_i)>, with elements listed explicitly.

    The construction checks that K is a normal subgroup whose cosets are exactly
    the coordinatewise residue classes, so reduction modulo ``moduli`` is the
    quotient homomorphism.
    """

    def __init__(self, spec: ACGroupSpec, moduli: Sequence[int]):
        moduli = tuple(int(m) for m in moduli)
        if len(moduli) != spec.rank or any(m < 1 for m in moduli):
            raise ValueError(f"need {spec.rank} positive moduli")
        self.spec = spec
        self.moduli = moduli
        self._check_admissible()

    @cached_property
    def elements(self) -> list[ACElement]:
        ranges = [range(m) for m in self.moduli]
        return [ACElement(n, e) for e in range(self.spec.order)
                for n in itertools.product(*ranges)]

    @cached_property
    def index(self) -> dict[ACElement, int]:
        return {x: i for i, x in enumerate(self.elements)}

    @property
    def order(self) -> int:
        return self.spec.order * math.prod(self.moduli)

    def reduce(self, x: ACElement) -> ACElement:
        return ACElement(tuple(a % m for a, m in zip(x.nil, self.moduli)), x.eps)

    def project(self, x: ACElement) -> int:
        return self.index[self.reduce(x)]

    def in_kernel(self, x: ACElement) -> bool:
        return self.reduce(x) == self.spec.identity

    def _check_admissible(self) -> None:
        spec, m = self.spec, self.moduli
        # closure of the coordinatewise lattice under the collection rule
        for (j, i), k in spec.nil.kappa.items():
            if (k * m[i] * m[j]) % m[0]:
                raise NotAdmissible(
                    f"e1 modulus {m[0]} does not divide {k}*{m[i]}*{m[j]} from [e{j + 1},e{i + 1}]"
                )
        kgens = [ACElement(tuple(m[i] * int(j == i) for j in range(spec.rank)), 0)
                 for i in range(spec.rank)]
        gens = list(spec.generators)
        gens += [ac_inverse(spec, g) for g in gens]
        for g in gens:
            ginv = ac_inverse(spec, g)
            for i, k in enumerate(kgens):
                c = ac_multiply(spec, ac_multiply(spec, g, k), ginv)
                if not self.in_kernel(c):
                    raise NotAdmissible(
                        f"conjugate of e{i + 1}^{m[i]} by {g} leaves the subgroup for moduli {m}"
                    )

    def respects(self, images: Sequence[ACElement]) -> bool:
        """Whether the endomorphism with these generator images maps K into K."""
        from .automorphisms import apply_images

        spec, m = self.spec, self.moduli
        for i in range(spec.rank):
            k = ACElement(tuple(m[i] * int(j == i) for j in range(spec.rank)), 0)
            if not self.in_kernel(apply_images(spec, images, k)):
                return False
        return True

    def multiply(self, i: int, j: int) -> int:
        return self.project(ac_multiply(self.spec, self.elements[i], self.elements[j]))

    def inverse(self, i: int) -> int:
        return self.project(ac_inverse(self.spec, self.elements[i]))

    def generator_indices(self) -> list[int]:
        return [self.project(g) for g in self.spec.generators]

    def multiplication_table(self) -> list[list[int]]:
        n = self.order
        return [[self.multiply(i, j) for j in range(n)] for i in range(n)]


def finite_quotient(spec: ACGroupSpec, moduli: Sequence[int]) -> FiniteQuotient:
    return FiniteQuotient(spec, moduli)
