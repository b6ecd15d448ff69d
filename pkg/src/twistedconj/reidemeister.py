"""Reidemeister numbers, the R-infinity criterion and Reidemeister spectra."""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .acgroup import ACElement, ACGroupSpec, Family, HolonomyRep, holonomy
from .automorphisms import (
    GeneratorImages,
    InvalidAutomorphism,
    _M,
    check_conditions_d3f2,
    complete_central,
    dstar,
    random_gl2,
)
from .linalg import (
    DimensionError,
    Matrix,
    _column_echelon,
    count_solutions_gf2,
    det,
    has_eigenvalue_one,
    mod2,
)
from .nilgroup import center_basis


class Infinite(enum.Enum):
    INFINITY = "infinity"

    def __str__(self) -> str:
        return "infinity"


INFINITY = Infinite.INFINITY
ReidemeisterValue = Union[int, Infinite]


class InconsistentAverage(ArithmeticError):
    """The averaging sum is not divisible by |F|; the inputs are wired inconsistently."""


class NotApplicable(ValueError):
    pass


# -- residue class sets ---------------------------------------------------------


@dataclass(frozen=True, order=True)
class Progression:
    """``{step * n + offset : n = 1, 2, 3, ...}``."""

    step: int
    offset: int

    def __post_init__(self):
        if self.step < 1:
            raise ValueError("step must be positive")
        if self.step + self.offset < 1:
            raise ValueError(f"{self} would contain non-positive numbers")

    @property
    def first(self) -> int:
        return self.step + self.offset

    def __contains__(self, x: int) -> bool:
        return x >= self.first and (x - self.offset) % self.step == 0

    def __str__(self) -> str:
        if self.offset == 0:
            return f"{self.step}N"
        return f"{self.step}N{'+' if self.offset > 0 else '-'}{abs(self.offset)}"


class ResidueClassSet:
    """A finite union of progressions, optionally with infinity.

    The stored progressions are canonical: pairwise disjoint, each as coarse as
    possible, sorted.  Two sets are equal exactly when they contain the same
    numbers.
    """

    __slots__ = ("progressions", "includes_infinity", "_tails", "_period")

    def __init__(self, progressions: Iterable[Progression | tuple[int, int]] = (),
                 includes_infinity: bool = False):
        progs = [p if isinstance(p, Progression) else Progression(*p) for p in progressions]
        period = math.lcm(*(p.step for p in progs)) if progs else 1
        tails: dict[int, int] = {}
        for p in progs:
            for j in range(period // p.step):
                x = p.first + j * p.step
                r = x % period
                tails[r] = min(tails.get(r, x), x)
        self._period = period
        self._tails = tails
        self.includes_infinity = bool(includes_infinity)
        self.progressions = self._canonical()

    def _canonical(self) -> tuple[Progression, ...]:
        L, tails = self._period, self._tails
        covered: set[int] = set()
        out = []
        for a in sorted(d for d in range(1, L + 1) if L % d == 0):
            for r in range(a):
                classes = [rho for rho in range(r, L, a)]
                if all(c in covered for c in classes) or any(c not in tails for c in classes):
                    continue
                f = min(tails[c] for c in classes)
                if all(_first_at_least(f, c, L) == tails[c] for c in classes):
                    out.append(Progression(a, f - a))
                    covered.update(classes)
        return tuple(sorted(out))

    def __contains__(self, x) -> bool:
        if x is INFINITY:
            return self.includes_infinity
        r = x % self._period
        return r in self._tails and x >= self._tails[r]

    def __or__(self, other: "ResidueClassSet") -> "ResidueClassSet":
        return ResidueClassSet(self.progressions + other.progressions,
                               self.includes_infinity or other.includes_infinity)

    def with_infinity(self, flag: bool = True) -> "ResidueClassSet":
        return ResidueClassSet(self.progressions, flag)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ResidueClassSet):
            return NotImplemented
        return (self.progressions, self.includes_infinity) == \
            (other.progressions, other.includes_infinity)

    def __hash__(self) -> int:
        return hash((self.progressions, self.includes_infinity))

    def __str__(self) -> str:
        parts = " u ".join(str(p) for p in self.progressions) or "{}"
        return parts + (" u {inf}" if self.includes_infinity else "")

    def __repr__(self) -> str:
        return f"ResidueClassSet({self})"

    def to_json(self) -> dict:
        return {"progressions": [{"step": p.step, "offset": p.offset} for p in self.progressions],
                "infinity": self.includes_infinity}

    @classmethod
    def from_json(cls, doc: dict) -> "ResidueClassSet":
        return cls([(p["step"], p["offset"]) for p in doc["progressions"]],
                   doc.get("infinity", False))


def _first_at_least(f: int, rho: int, L: int) -> int:
    return f + (rho - f) % L


def union(sets: Iterable[ResidueClassSet]) -> ResidueClassSet:
    out = ResidueClassSet()
    for s in sets:
        out = out | s
    return out


# -- criteria and formulas ------------------------------------------------------


def rinfty_check(F: HolonomyRep, D: Matrix) -> bool:
    """True when R(phi) is infinite: some A_* D_* has eigenvalue 1."""
    if D.shape != (F.dimension, F.dimension):
        raise DimensionError(f"D_* is {D.shape}, holonomy acts in dimension {F.dimension}")
    return any(has_eigenvalue_one(A @ D) for _, A in F)


def averaging(F: HolonomyRep, D: Matrix) -> ReidemeisterValue:
    """``(1/|F|) sum_A |det(1 - A_* D_*)|``; only meaningful for almost-Bieberbach groups."""
    if rinfty_check(F, D):
        return INFINITY
    n = D.rows
    total = sum(abs(det(Matrix.identity(n) - A @ D)) for _, A in F)
    q, r = divmod(total, F.order)
    if r:
        raise InconsistentAverage(f"sum {total} is not divisible by |F| = {F.order}")
    return q


def averaging_for(images: GeneratorImages) -> ReidemeisterValue:
    return averaging(holonomy(images.spec), dstar(images.spec, images))


def ii_prime_holds(k: Sequence[int], z2: int, z3: int) -> bool:
    k1, k2, k3, k4 = k
    return (k1 * z2 * z3 - k2 * z2 - k3 * z3 - k4) % 2 == 1


def compute_S(k: Sequence[int], Mbar: Matrix, dbar: Sequence[int]) -> int:
    """Solutions of (1 - M) z = d over Z/2 that fail the e1-parity congruence."""
    A = mod2(Matrix.identity(2) - Mbar)
    target = tuple(x % 2 for x in dbar)
    S = 0
    for z in itertools.product((0, 1), repeat=2):
        if tuple(x % 2 for x in A.apply(z)) == target and not ii_prime_holds(k, *z):
            S += 1
    return S


def r_number_d3f2(k: Sequence[int], M, d: Sequence[int]) -> ReidemeisterValue:
    M = _M(M)
    conds = check_conditions_d3f2(k, M, d)
    failed = [c for c, ok in conds.items() if not ok]
    if failed:
        raise InvalidAutomorphism("condition(s) " + ", ".join(f"({c})" for c in failed)
                                  + " fail", failed)
    tr = M.trace()
    if tr == 0:
        return INFINITY
    return 2 * (abs(tr) + compute_S(k, mod2(M), d))


def r_number_quotient(M, d: Sequence[int]) -> ReidemeisterValue:
    """Reidemeister number of the induced automorphism on the 2-dimensional quotient."""
    M = _M(M)
    tr = M.trace()
    if tr == 0:
        return INFINITY
    return abs(tr) + count_solutions_gf2(Matrix.identity(2) - M, d)


def residue_set_for(Mbar: Matrix, S: int) -> ResidueClassSet:
    Mbar = mod2(Mbar)
    if Mbar == Matrix.identity(2):
        return ResidueClassSet([(8, 2 * S)])
    if Mbar.trace() % 2 == 0:
        return ResidueClassSet([(4, 2 * S)])
    return ResidueClassSet([(4, 2 * S - 2)])


def spectrum_d3f2(k: Sequence[int]) -> ResidueClassSet:
    from .makelist import make_list, spectrum_from_rows

    return spectrum_from_rows(make_list(k)).with_infinity()


def swap_parameters(k: Sequence[int]) -> tuple[int, int, int, int]:
    """Parameters of an isomorphic group: (k1, k2, k3, k4) -> (-k1, k3, k2, k4)."""
    k1, k2, k3, k4 = k
    return (-k1, k3, k2, k4)


def known_spectra() -> dict[str, dict]:
    """Spectra quoted from the literature rather than computed here."""
    return {
        "d3f1": {
            "groups": "torsion-free nilpotent, rank 3, class 2",
            "spectrum": ResidueClassSet([(2, 0)], True),
        },
        "d4f1": {
            "groups": "torsion-free nilpotent, rank 4, class 2",
            "spectrum": ResidueClassSet([(4, 0)], True),
        },
        "d4f4 (k,0,0,0)": {
            "groups": "almost-Bieberbach groups of family 4 with parameters (k,0,0,0)",
            "spectrum": ResidueClassSet([(4, 0)], True),
        },
        "d4f4 (2k,1,0,0)": {
            "groups": "almost-Bieberbach groups of family 4 with parameters (2k,1,0,0)",
            "spectrum": ResidueClassSet([(8, 0)], True),
        },
        "d4 class 3": {
            "groups": "4-dimensional groups whose lattice has nilpotency class 3",
            "spectrum": ResidueClassSet([], True),
        },
    }


# -- sampling evidence for the R-infinity families --------------------------------


@dataclass
class EvidenceReport:
    family: Family
    requested: int
    seed: int
    attempts: int = 0
    valid: int = 0
    counterexamples: list = field(default_factory=list)
    note: str = "evidence, not proof: finitely many sampled automorphisms"

    @property
    def ok(self) -> bool:
        return not self.counterexamples and self.valid >= self.requested

    def to_json(self) -> dict:
        return {
            "family": self.family.value,
            "requested": self.requested,
            "seed": self.seed,
            "attempts": self.attempts,
            "valid": self.valid,
            "counterexamples": self.counterexamples,
            "note": self.note,
        }


def _small(rng: random.Random, b: int = 3) -> int:
    return rng.randint(-b, b)


def _unimodular_with_first_column(v: Sequence[int]) -> Matrix:
    """Integer matrix of determinant +-1 whose first column is the primitive vector v."""
    _, V, _ = _column_echelon([list(v)], len(v))
    # v^T V = (g, 0, ..., 0) with g = 1, so the inverse transpose of V starts with v
    P = Matrix.of(V).inverse().T
    if P.column(0) != tuple(v):
        P = Matrix.of([[-x for x in row] for row in P])
    return P


def _candidate_d4f2(rng: random.Random):
    while True:
        k = [_small(rng) for _ in range(7)]
        if any(k[:3]):
            break
    spec = ACGroupSpec(Family.D4F2, k)
    g = center_basis(spec.nil)[1][1:]
    P = _unimodular_with_first_column(g)
    nu = rng.choice((-1, 1))
    lam = rng.choice((-1, 1))
    C = random_gl2(rng, nu, bound=3)
    T = [[lam, _small(rng), _small(rng)],
         [0, C[0, 0], C[0, 1]],
         [0, C[1, 0], C[1, 1]]]
    if rng.random() < 0.2:
        T[rng.choice((1, 2))][0] = rng.choice((-1, 1))
    Dp = P @ Matrix.of(T) @ P.inverse()
    images = [ACElement((nu, 0, 0, 0))]
    for i in range(3):
        images.append(ACElement((0, *Dp.column(i))))
    images.append(ACElement((0, _small(rng), _small(rng), _small(rng)), 1))
    unknowns = [(1, 0), (2, 0), (3, 0), (4, 0)]
    return spec, images, unknowns


_ROT = Matrix.of([[0, -1], [1, -1]])
_FLIP = Matrix.of([[0, 1], [1, 0]])


def _candidate_trigonal(family: Family, rng: random.Random):
    k = [_small(rng) for _ in range(4)]
    if k[0] == 0:
        k[0] = rng.choice((-2, -1, 1, 2))
    spec = ACGroupSpec(family, k)
    if rng.random() < 0.8:
        C = _ROT ** rng.randrange(3)
        if rng.random() < 0.5:
            C = C @ _FLIP
        if rng.random() < 0.5:
            C = -C
    else:
        C = random_gl2(rng, rng.choice((-1, 1)), bound=3)
    if C @ _ROT == _ROT @ C:
        j = 1
    elif C @ _ROT == (_ROT ** 2) @ C:
        j = 2
    else:
        j = rng.choice((1, 2))
    nu = det(C) if rng.random() < 0.8 else rng.choice((-1, 1))
    delta = rng.choice((-1, 1))
    images = [
        ACElement((nu, 0, 0, 0)),
        ACElement((0, delta, 0, 0)),
        ACElement((0, 0, C[0, 0], C[1, 0])),
        ACElement((0, 0, C[0, 1], C[1, 1])),
        ACElement((0, 0, _small(rng), _small(rng)), j),
    ]
    unknowns = [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (4, 0), (4, 1)]
    return spec, images, unknowns


def _bijective(spec: ACGroupSpec, gi: GeneratorImages) -> bool:
    # relations already verified by complete_central
    if any(gi[i].eps for i in range(spec.rank)):
        return False
    return abs(det(dstar(spec, gi))) == 1 and math.gcd(gi[spec.rank].eps, spec.order) == 1


def rinfty_family_evidence(family: Family | str, samples: int = 1000, seed: int = 0,
                           max_attempts: int | None = None) -> EvidenceReport:
    """Sample automorphisms of a family claimed to have the R-infinity property.

    Candidates are drawn around the shapes the centre forces on an automorphism
    (with deliberate perturbations); each is accepted only after the group
    arithmetic confirms it is an automorphism.  Every accepted one must satisfy
    :func:`rinfty_check`.
    """
    family = Family.parse(family) if isinstance(family, str) else family
    if family is Family.D4F2:
        draw = _candidate_d4f2
    elif family in (Family.D4F143, Family.D4F146):
        def draw(rng):
            return _candidate_trigonal(family, rng)
    else:
        raise NotApplicable(f"{family.value} is not one of the sampled R-infinity families "
                            "(d4f2, d4f143, d4f146)")
    rng = random.Random(seed)
    report = EvidenceReport(family, samples, seed)
    limit = max_attempts if max_attempts is not None else 50 * samples
    while report.valid < samples and report.attempts < limit:
        report.attempts += 1
        spec, images, unknowns = draw(rng)
        done = complete_central(spec, images, unknowns)
        if done is None:
            continue
        gi = GeneratorImages(spec, done)
        if not _bijective(spec, gi):
            continue
        report.valid += 1
        if not rinfty_check(holonomy(spec), dstar(spec, gi)):
            report.counterexamples.append(
                {"params": list(spec.params), "images": [[list(x.nil), x.eps] for x in done]}
            )
    return report
