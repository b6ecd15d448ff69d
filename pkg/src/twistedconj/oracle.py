"""Brute-force twisted conjugacy counts that use none of the closed forms.

Three routes:

* :func:`twisted_classes_finite` on an explicit multiplication table;
* :func:`quotient_twisted_classes` on a finite quotient of an AC-group, acting
  only by generators (orbits of a group action are the orbits of its generators);
* :func:`boxed_twisted_classes` on a window of the 2-dimensional quotient
  ``Z^2 x| Z/2`` by ``<e1>``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .acgroup import (
    ACElement,
    ACGroupSpec,
    Family,
    FiniteQuotient,
    NotAdmissible,
    ac_inverse,
    ac_multiply,
)
from .automorphisms import _M, build_d3f2
from .reidemeister import INFINITY, r_number_d3f2


class OracleError(ValueError):
    pass


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.components = n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb
            self.components -= 1


# -- explicit tables --------------------------------------------------------------


@dataclass
class FiniteGroupTable:
    """A finite group by its Cayley table, with an endomorphism ``phi`` as an image array.

    Element 0 need not be the identity; it is located and checked.
    """

    table: list[list[int]]
    phi: list[int]
    inverse: list[int] = field(init=False)
    identity: int = field(init=False)

    def __post_init__(self):
        n = len(self.table)
        if n == 0 or any(len(r) != n for r in self.table):
            raise OracleError("table must be a non-empty square")
        if any(not 0 <= x < n for r in self.table for x in r):
            raise OracleError("table entry out of range")
        ids = [e for e in range(n) if all(self.table[e][x] == x == self.table[x][e] for x in range(n))]
        if len(ids) != 1:
            raise OracleError("no two-sided identity")
        self.identity = e = ids[0]
        inv = []
        for x in range(n):
            ys = [y for y in range(n) if self.table[x][y] == e]
            if len(ys) != 1 or self.table[ys[0]][x] != e:
                raise OracleError(f"element {x} has no inverse")
            inv.append(ys[0])
        self.inverse = inv
        t = self.table
        for a, b, c in itertools.product(range(n), repeat=3):
            if t[t[a][b]][c] != t[a][t[b][c]]:
                raise OracleError(f"not associative at ({a}, {b}, {c})")
        if len(self.phi) != n or any(not 0 <= x < n for x in self.phi):
            raise OracleError("phi must map the group into itself")
        for a, b in itertools.product(range(n), repeat=2):
            if self.phi[t[a][b]] != t[self.phi[a]][self.phi[b]]:
                raise OracleError(f"phi is not a homomorphism at ({a}, {b})")

    @property
    def order(self) -> int:
        return len(self.table)

    @classmethod
    def cyclic(cls, n: int, multiplier: int = 1) -> "FiniteGroupTable":
        """``Z/n`` with ``phi(x) = multiplier * x``."""
        return cls([[(a + b) % n for b in range(n)] for a in range(n)],
                   [(multiplier * a) % n for a in range(n)])


def twisted_classes_finite(g: FiniteGroupTable) -> int:
    """Classes of ``x ~ h x phi(h)^-1`` over all pairs (x, h)."""
    t, inv, phi = g.table, g.inverse, g.phi
    uf = UnionFind(g.order)
    for h in range(g.order):
        right = inv[phi[h]]
        row = t[h]
        for x in range(g.order):
            uf.union(x, t[row[x]][right])
    return uf.components


def conjugacy_classes(g: FiniteGroupTable) -> int:
    """Ordinary conjugacy classes, counted as distinct conjugacy orbits."""
    t, inv = g.table, g.inverse
    orbits = {frozenset(t[t[h][x]][inv[h]] for h in range(g.order)) for x in range(g.order)}
    return len(orbits)


# -- finite quotients of AC-groups ---------------------------------------------------


def quotient_twisted_classes(q: FiniteQuotient, images: Sequence[ACElement]) -> int:
    """Twisted classes of the induced endomorphism on ``q``.

    ``images`` are the generator images of an endomorphism that maps the kernel
    into itself (checked).
    """
    spec = q.spec
    if not q.respects(images):
        raise NotAdmissible(f"endomorphism does not preserve the kernel for moduli {q.moduli}")
    n = q.order
    uf = UnionFind(n)
    for s, phs in zip(spec.generators, images):
        right = ac_inverse(spec, phs)
        for i, x in enumerate(q.elements):
            y = ac_multiply(spec, ac_multiply(spec, s, x), right)
            uf.union(i, q.index[q.reduce(y)])
    return uf.components


def _usable(spec: ACGroupSpec, images, moduli) -> bool:
    try:
        q = FiniteQuotient(spec, moduli)
    except NotAdmissible:
        return False
    return q.respects(images)


def default_schedule(spec: ACGroupSpec, images: Sequence[ACElement], M,
                     max_order: int = 20000) -> list[tuple[int, int]]:
    """A divisibility chain of usable (e1 modulus, lattice modulus) pairs.

    phi inverts e1, so only 2-power e1 moduli can separate classes; lattice
    moduli are ``|tr M|`` times a power of two, since ``|det(1 - M)| = |tr M|``.
    The chain tops out at the largest usable quotient (ties go to the larger e1
    modulus) and descends through the largest usable divisor at each step, so
    the kernels are nested.
    """
    tr = abs(_M(M).trace())
    if tr == 0:
        raise OracleError("trace zero: infinitely many classes, nothing to saturate")
    order = spec.order
    usable = []
    m0 = 1
    while order * m0 * tr * tr <= max_order:
        m = tr
        while order * m0 * m * m <= max_order:
            if _usable(spec, images, (m0, m, m)):
                usable.append((m0, m))
            m *= 2
        m0 *= 2
    if not usable:
        return []

    def key(p):
        return (p[0] * p[1] ** 2, p[0])

    chain = [max(usable, key=key)]
    while True:
        c0, c = chain[-1]
        below = [p for p in usable if c0 % p[0] == 0 and c % p[1] == 0 and p != (c0, c)]
        if not below:
            break
        chain.append(max(below, key=key))
    return chain[::-1]


@dataclass
class OracleReport:
    k: tuple[int, ...]
    M: list[list[int]]
    d: tuple[int, ...]
    closed_form: int
    levels: list[dict] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)

    @property
    def counts(self) -> list[int]:
        return [lv["count"] for lv in self.levels]

    @property
    def bounded(self) -> bool:
        return all(c <= self.closed_form for c in self.counts)

    @property
    def monotone(self) -> bool:
        c = self.counts
        return all(a <= b for a, b in zip(c, c[1:]))

    @property
    def saturated(self) -> bool:
        return bool(self.levels) and self.counts[-1] == self.closed_form

    @property
    def saturated_at(self) -> int | None:
        for lv in self.levels:
            if lv["count"] == self.closed_form:
                return lv["order"]
        return None

    @property
    def ok(self) -> bool:
        return self.bounded and self.monotone and self.saturated

    def to_json(self) -> dict:
        return {"k": list(self.k), "M": self.M, "d": list(self.d),
                "closed_form": self.closed_form, "levels": self.levels,
                "skipped": self.skipped, "bounded": self.bounded,
                "monotone": self.monotone, "saturated": self.saturated,
                "saturated_at_order": self.saturated_at, "ok": self.ok}


def oracle_compare_d3f2(k: Sequence[int], M, d: Sequence[int],
                        schedule: Iterable[tuple[int, int]] | None = None,
                        max_order: int = 20000) -> OracleReport:
    """Twisted class counts on a chain of finite quotients, against ``2(|tr M| + S)``.

    Quotients are ``Gamma / <e1^m0, e2^m, e3^m>``.  Levels that are not normal
    subgroups, or not preserved by the automorphism, are skipped and listed.
    """
    k = tuple(int(x) for x in k)
    Mm = _M(M)
    d = tuple(int(x) for x in d)
    images = build_d3f2(k, Mm, d).images
    R = r_number_d3f2(k, Mm, d)
    if R is INFINITY:
        raise OracleError("R is infinite; no finite quotient can reach it")
    spec = ACGroupSpec(Family.D3F2, k)
    report = OracleReport(k, Mm.tolist(), d, R)
    levels = (list(schedule) if schedule is not None
              else default_schedule(spec, images, Mm, max_order))
    for m0, m in levels:
        if 2 * m0 * m * m > max_order:
            report.skipped.append({"moduli": [m0, m, m], "reason": "order above limit"})
            continue
        try:
            q = FiniteQuotient(spec, (m0, m, m))
            count = quotient_twisted_classes(q, images)
        except NotAdmissible as exc:
            report.skipped.append({"moduli": [m0, m, m], "reason": str(exc)})
            continue
        report.levels.append({"moduli": [m0, m, m], "order": q.order, "count": count})
    if not report.levels:
        raise OracleError("no admissible quotient in the schedule")
    return report


# -- the 2-dimensional quotient, on a box ---------------------------------------------


def _box_count(M: tuple[int, int, int, int], d: tuple[int, int], B: int) -> int:
    m11, m12, m21, m22 = M
    side = 2 * B + 1
    n = 2 * side * side
    eps, y, x = np.unravel_index(np.arange(n), (2, side, side))
    vx, vy = x - B, y - B
    sign = 1 - 2 * eps

    def index(ex, ey, ee):
        ok = (np.abs(ex) <= B) & (np.abs(ey) <= B)
        return ok, (ee * side + (ey + B)) * side + (ex + B)

    src, dst = [], []
    # (v, e) -> s (v, e) phi(s)^-1 for s = t1, t2 (lattice) and s = a (the flip)
    for tx, ty in ((1, 0), (0, 1)):
        mx, my = m11 * tx + m12 * ty, m21 * tx + m22 * ty
        # (t,0)(v,e) = (t+v, e); times (-Mt, 0) on the right: (t + v - (-1)^e M t, e)
        nx, ny = tx + vx - sign * mx, ty + vy - sign * my
        ok, j = index(nx, ny, eps)
        src.append(np.arange(n)[ok])
        dst.append(j[ok])
    # phi(a) = (d, 1) is its own inverse; (0,1)(v,e) = (-v, 1+e); then (-v + (-1)^(1+e) d, e)
    nx, ny = -vx - sign * d[0], -vy - sign * d[1]
    ok, j = index(nx, ny, eps)
    src.append(np.arange(n)[ok])
    dst.append(j[ok])
    src, dst = np.concatenate(src), np.concatenate(dst)
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="weak")
    inner = (np.abs(vx) <= B // 2) & (np.abs(vy) <= B // 2)
    return int(len(np.unique(labels[inner])))


def boxed_twisted_classes(M, d: Sequence[int], B: int = 16) -> tuple[int, bool]:
    """Classes of ``phi'(v, e) = (M v + e d, e)`` meeting the inner box ``[-B/2, B/2]^2``.

    Returns the count at box ``B`` and whether it agrees with box ``2B``.
    """
    Mm = _M(M)
    if Mm.trace() == 0:
        raise OracleError("trace zero: the count does not stabilise")
    if B < 4:
        raise OracleError("box too small")
    m = (Mm[0, 0], Mm[0, 1], Mm[1, 0], Mm[1, 1])
    d = (int(d[0]), int(d[1]))
    c1 = _box_count(m, d, B)
    c2 = _box_count(m, d, 2 * B)
    return c1, c1 == c2
