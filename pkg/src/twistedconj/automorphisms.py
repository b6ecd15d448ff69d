"""Parameterised automorphisms of the almost-crystallographic families.

An automorphism is stored by the images of the generators ``e1..er, alpha``.
Nothing is assumed: :func:`relation_failures` re-checks every defining relation
with the group arithmetic, and the builders refuse parameter tuples whose
exponents would not be integers.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .acgroup import (
    ACElement,
    ACGroupSpec,
    Family,
    ac_multiply,
    ac_inverse,
    ac_power,
    evaluate_word,
)
from .linalg import Matrix, det, solve_integer_system


class InvalidAutomorphism(ValueError):
    """Parameters do not define an automorphism; ``failed`` names the broken conditions."""

    def __init__(self, message: str, failed: Sequence[str] = ()):
        super().__init__(message)
        self.failed = tuple(failed)


@dataclass(frozen=True)
class GeneratorImages:
    spec: ACGroupSpec
    images: tuple[ACElement, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(ACElement(tuple(n), e) for n, e in self.images))
        if len(self.images) != len(self.spec.generators):
            raise ValueError("need one image per generator")

    def __iter__(self):
        return iter(self.images)

    def __getitem__(self, i: int) -> ACElement:
        return self.images[i]


def _M(m) -> Matrix:
    m = m if isinstance(m, Matrix) else Matrix.of(m)
    if m.shape != (2, 2) or not m.is_integral:
        raise ValueError("M must be a 2x2 integer matrix [[m1, m3], [m2, m4]]")
    return m


def _entries(M: Matrix) -> tuple[int, int, int, int]:
    """(m1, m2, m3, m4) from M = [[m1, m3], [m2, m4]]."""
    return M[0, 0], M[1, 0], M[0, 1], M[1, 1]


def identity_images(spec: ACGroupSpec) -> GeneratorImages:
    return GeneratorImages(spec, spec.generators)


def apply_images(spec: ACGroupSpec, images: Sequence[ACElement], x: ACElement) -> ACElement:
    out = spec.identity
    for g, a in zip(images, x.nil):
        if a:
            out = ac_multiply(spec, out, ac_power(spec, g, a))
    if x.eps:
        out = ac_multiply(spec, out, ac_power(spec, images[spec.rank], x.eps))
    return out


def apply(spec: ACGroupSpec, images: GeneratorImages, x: ACElement) -> ACElement:
    return apply_images(spec, images.images, x)


def relation_defects(spec: ACGroupSpec, images: Sequence[ACElement]) -> list[tuple[str, ACElement]]:
    """For each relation u = v, the element phi(u) phi(v)^-1 (identity when it holds)."""
    out = []
    for name, lhs, rhs in spec.relations():
        u = evaluate_word(spec, images, lhs)
        v = evaluate_word(spec, images, rhs)
        out.append((name, ac_multiply(spec, u, ac_inverse(spec, v))))
    return out


def relation_failures(spec: ACGroupSpec, images: Sequence[ACElement]) -> list[str]:
    return [name for name, d in relation_defects(spec, images) if d != spec.identity]


def dstar(spec: ACGroupSpec, images: GeneratorImages) -> Matrix:
    """Matrix whose i-th column is the exponent vector of phi(e_i)."""
    cols = []
    for i in range(spec.rank):
        img = images[i]
        if img.eps:
            raise InvalidAutomorphism(f"image of e{i + 1} leaves the lattice")
        cols.append(img.nil)
    return Matrix.of(zip(*cols))


def is_automorphism(spec: ACGroupSpec, images: GeneratorImages) -> bool:
    if relation_failures(spec, images.images):
        return False
    if any(images[i].eps for i in range(spec.rank)):
        return False
    if abs(det(dstar(spec, images))) != 1:
        return False
    if spec.order > 1 and math.gcd(images[spec.rank].eps, spec.order) != 1:
        return False
    return True


def validated(spec: ACGroupSpec, images: Sequence[ACElement]) -> GeneratorImages:
    gi = GeneratorImages(spec, tuple(images))
    failed = relation_failures(spec, gi.images)
    if failed:
        raise InvalidAutomorphism(f"images break relations {failed}", failed)
    if not is_automorphism(spec, gi):
        raise InvalidAutomorphism("images define an endomorphism that is not bijective")
    return gi


# -- 3-dimensional family 2 ------------------------------------------------


def _d3f2_numerators(k, M: Matrix, d) -> tuple[int, int, int]:
    """Twice the e1 exponents of phi(e2), phi(e3) and phi(alpha) + k4."""
    k1, k2, k3, _ = k
    m1, m2, m3, m4 = _entries(M)
    d1, d2 = d
    a = k1 * (m1 * m2 + m1 * d2 - m2 * d1) - k2 * (m1 + 1) - k3 * m2
    b = k1 * (m3 * m4 + m3 * d2 - m4 * d1) - k2 * m3 - k3 * (m4 + 1)
    c = k1 * d1 * d2 - k2 * d1 - k3 * d2
    return a, b, c


def check_conditions_d3f2(k: Sequence[int], M, d: Sequence[int]) -> dict[str, bool]:
    """The integrality conditions (a)-(c) and det M = -1 (d)."""
    M = _M(M)
    a, b, c = _d3f2_numerators(tuple(k), M, tuple(d))
    return {"a": a % 2 == 0, "b": b % 2 == 0, "c": c % 2 == 0, "d": det(M) == -1}


def build_d3f2(k: Sequence[int], M, d: Sequence[int]) -> GeneratorImages:
    k = tuple(int(x) for x in k)
    M = _M(M)
    d = tuple(int(x) for x in d)
    conds = check_conditions_d3f2(k, M, d)
    failed = [c for c, ok in conds.items() if not ok]
    if failed:
        raise InvalidAutomorphism("condition(s) " + ", ".join(f"({c})" for c in failed)
                                  + f" fail for k={k}, M={M}, d={d}", failed)
    spec = ACGroupSpec(Family.D3F2, k)
    a, b, c = _d3f2_numerators(k, M, d)
    m1, m2, m3, m4 = _entries(M)
    d1, d2 = d
    images = (
        ACElement((-1, 0, 0)),
        ACElement((a // 2, m1, m2)),
        ACElement((b // 2, m3, m4)),
        ACElement((c // 2 - k[3], d1, d2), 1),
    )
    return GeneratorImages(spec, images)


# -- 4-dimensional families 3, 4, 5 ------------------------------------------


def _require_params(spec: ACGroupSpec, ok: bool, shape: str) -> None:
    if not ok:
        raise InvalidAutomorphism(f"{spec} is not of the form {shape}", ["params"])


def build_d4_family(spec: ACGroupSpec, variant: str = "generic", *, M=None, d=(0, 0),
                    l: int = 0, m: int | None = None) -> GeneratorImages:
    """Automorphisms of the 4-dimensional families 3, 4 and 5.

    variants:
      ``"finite"``  -- the finite-Reidemeister-number automorphism that exists for
                       every group in families 3, 4 and 5;
      ``"generic"`` -- the general form for the almost-Bieberbach groups of
                       family 3 (params (2k,0,0,1)) or family 5 (params (k,0,0,1)),
                       given M, d and the free exponent l;
      ``"phi_m"``   -- the one-parameter family realising the spectrum.
    """
    fam = spec.family
    if fam not in (Family.D4F3, Family.D4F4, Family.D4F5):
        raise InvalidAutomorphism(f"{fam.value} is not one of the families 3, 4, 5", ["family"])
    k1, k2, k3, k4 = spec.params
    mu, nu = {Family.D4F3: (0, 0), Family.D4F4: (1, 0), Family.D4F5: (0, 1)}[fam]

    if variant == "finite":
        images = (
            ACElement((-1, 0, 0, 0)),
            ACElement((0, -1, 0, 0)),
            ACElement((k1 - k2 - k3, nu, 1, 2)),
            ACElement((3 * k1 - k2 - 2 * k3, nu, 2, 3)),
            ACElement((-k4, -mu, 0, 0), 1),
        )
        return validated(spec, images)

    if fam is Family.D4F4:
        raise InvalidAutomorphism("only the 'finite' variant is available for family 4",
                                  ["variant"])

    if fam is Family.D4F3:
        _require_params(spec, k1 % 2 == 0 and (k2, k3, k4) == (0, 0, 1), "(2k,0,0,1)")
        k = k1 // 2
        if variant == "phi_m":
            if m is None:
                raise ValueError("phi_m needs m")
            images = (
                ACElement((-1, 0, 0, 0)),
                ACElement((0, -1, 0, 0)),
                ACElement((0, 0, 0, 1)),
                ACElement((k * m, 0, 1, m)),
                ACElement((-1, 0, 0, 0), 1),
            )
            return validated(spec, images)
        if variant != "generic":
            raise ValueError(f"unknown variant {variant!r}")
        M = _M(M)
        m1, m2, m3, m4 = _entries(M)
        if det(M) != -1:
            raise InvalidAutomorphism(f"det M = {det(M)}, need -1", ["det"])
        d1, d2 = d
        images = (
            ACElement((-1, 0, 0, 0)),
            ACElement((l, -1, 0, 0)),
            ACElement((k * (m1 * m2 + m1 * d2 - m2 * d1), 0, m1, m2)),
            ACElement((k * (m3 * m4 + m3 * d2 - m4 * d1), 0, m3, m4)),
            ACElement((k * d1 * d2 - 1, 0, d1, d2), 1),
        )
        return validated(spec, images)

    # family 5
    _require_params(spec, (k2, k3, k4) == (0, 0, 1), "(k,0,0,1)")
    k = k1
    if variant == "phi_m":
        if m is None:
            raise ValueError("phi_m needs m")
        images = (
            ACElement((-1, 0, 0, 0)),
            ACElement((k * (2 * m - 1), -1, 0, 0)),
            ACElement((0, m, 2 * m - 1, 1)),
            ACElement((k * m, m, 2 * m, 1)),
            ACElement((-1, 0, 0, 0), 1),
        )
        return validated(spec, images)
    if variant != "generic":
        raise ValueError(f"unknown variant {variant!r}")
    M = _M(M)
    m1, m2, m3, m4 = _entries(M)
    if m1 - m4 + 2 * m1 * m4 - m2 * m3 != 0:
        raise InvalidAutomorphism("m1 - m4 + 2 m1 m4 - m2 m3 must vanish", ["quadratic"])
    d1, d2 = d
    images = (
        ACElement((-1, 0, 0, 0)),
        ACElement((k * (2 * m1 * m2 + 2 * m1 * d2 - 2 * m2 * d1 - m2 - d2) - 2 * l, -1, 0, 0)),
        ACElement((l, m1, -1 + 2 * m1, m2)),
        ACElement((k * (2 * m3 * m4 + m3 * d2 + m3 - 2 * m4 * d1 - d1), m3, 2 * m3, 1 + 2 * m4)),
        ACElement((k * d1 * d2 - 1, d1, 2 * d1, d2), 1),
    )
    return validated(spec, images)


# -- completing central exponents ---------------------------------------------


def is_central(spec: ACGroupSpec, coord: int) -> bool:
    """Whether the generator e_(coord+1) is central in Gamma."""
    g = spec.generators[coord]
    return all(ac_multiply(spec, g, h) == ac_multiply(spec, h, g) for h in spec.generators)


def _exponent_sum(word, g: int) -> int:
    return sum(e for h, e in word if h == g)


def complete_central(spec: ACGroupSpec, images: Sequence[ACElement],
                     unknowns: Sequence[tuple[int, int]]) -> tuple[ACElement, ...] | None:
    """Fill in the listed (generator, coordinate) exponents so every relation holds.

    Each listed coordinate must belong to a generator of N that is central in
    Gamma.  Multiplying phi(g) by a central z multiplies the defect of a
    relation by z to the power (exponent sum of g in lhs minus in rhs), so the
    conditions form an integer linear system.  Returns None when it has no
    solution; a returned tuple has been re-checked against every relation.
    """
    for _, c in unknowns:
        if not is_central(spec, c):
            raise ValueError(f"e{c + 1} is not central in {spec}")
    base = [ACElement(tuple(x.nil), x.eps) for x in images]

    def with_values(vals):
        out = [list(x.nil) for x in base]
        for (g, c), v in zip(unknowns, vals):
            out[g][c] = v
        return [ACElement(tuple(n), x.eps) for n, x in zip(out, base)]

    start = with_values([0] * len(unknowns))
    rows, rhs = [], []
    for (_, lhs, rhs_word), (_, dfc) in zip(spec.relations(), relation_defects(spec, start)):
        if dfc.eps:
            return None
        for c in range(spec.rank):
            rows.append([(_exponent_sum(lhs, g) - _exponent_sum(rhs_word, g)) * int(uc == c)
                         for g, uc in unknowns])
            rhs.append(-dfc.nil[c])
    sol = solve_integer_system(rows, rhs)
    if sol is None:
        return None
    result = with_values(sol)
    if relation_failures(spec, result):
        return None
    return tuple(result)


# -- random valid automorphisms ---------------------------------------------


def random_gl2(rng: random.Random, det_sign: int = -1, steps: int = 4, bound: int = 3) -> Matrix:
    """A random 2x2 integer matrix of determinant ``det_sign`` (entries kept small)."""
    while True:
        m = Matrix.of([[1, 0], [0, det_sign]])
        if rng.random() < 0.5:
            m = m @ Matrix.of([[0, 1], [1, 0]]) @ Matrix.of([[1, 0], [0, -1]]) if det_sign == 1 \
                else Matrix.of([[0, 1], [1, 0]])
        for _ in range(rng.randint(0, steps)):
            t = rng.choice([-2, -1, 1, 2])
            e = Matrix.of([[1, t], [0, 1]]) if rng.random() < 0.5 else Matrix.of([[1, 0], [t, 1]])
            m = e @ m if rng.random() < 0.5 else m @ e
        if max(abs(x) for row in m for x in row) <= bound:
            return m


def random_d3f2(k: Sequence[int], rng: random.Random, bound: int = 3,
                require_finite: bool = False) -> tuple[Matrix, tuple[int, int]]:
    """Random (M, d) satisfying conditions (a)-(d) for the given k."""
    for _ in range(10000):
        M = random_gl2(rng, -1, bound=bound)
        if require_finite and M.trace() == 0:
            continue
        d = (rng.randint(-bound, bound), rng.randint(-bound, bound))
        if all(check_conditions_d3f2(k, M, d).values()):
            return M, d
    raise RuntimeError(f"no valid automorphism found for k={tuple(k)}")


def random_d4_generic(family: Family, rng: random.Random, bound: int = 4) -> tuple[GeneratorImages, Matrix]:
    """A random automorphism of the generic shape for family 3 or 5; returns (images, M)."""
    family = Family.parse(family) if isinstance(family, str) else family
    if family is Family.D4F3:
        spec = ACGroupSpec(family, (2 * rng.randint(1, bound), 0, 0, 1))
        M = random_gl2(rng, -1, bound=bound)
    elif family is Family.D4F5:
        spec = ACGroupSpec(family, (rng.randint(1, bound), 0, 0, 1))
        while True:
            m1, m4 = rng.randint(-bound, bound), rng.randint(-bound, bound)
            t = m1 - m4 + 2 * m1 * m4
            if t == 0:
                m2, m3 = (0, rng.randint(-bound, bound)) if rng.random() < 0.5 \
                    else (rng.randint(-bound, bound), 0)
                break
            divisors = [x for x in range(-abs(t), abs(t) + 1) if x and t % x == 0]
            m2 = rng.choice(divisors)
            m3 = t // m2
            break
        M = Matrix.of([[m1, m3], [m2, m4]])
    else:
        raise ValueError("generic automorphisms exist for d4f3 and d4f5 only")
    d = (rng.randint(-bound, bound), rng.randint(-bound, bound))
    images = build_d4_family(spec, "generic", M=M, d=d, l=rng.randint(-bound, bound))
    return images, M


@dataclass(frozen=True)
class AutSpec:
    """Canonical parameters (M, d, extra exponents) of an automorphism of a family."""

    spec: ACGroupSpec
    M: Matrix
    d: tuple[int, int]
    extra: dict = field(default_factory=dict)

    def build(self) -> GeneratorImages:
        fam = self.spec.family
        if fam is Family.D3F2:
            return build_d3f2(self.spec.params, self.M, self.d)
        return build_d4_family(self.spec, self.extra.get("variant", "generic"),
                               M=self.M, d=self.d, l=self.extra.get("l", 0),
                               m=self.extra.get("m"))
