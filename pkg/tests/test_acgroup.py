from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistedconj.acgroup import (
    ACElement,
    ACGroupSpec,
    Family,
    NotAdmissible,
    SpecMismatch,
    ac_inverse,
    ac_lambda,
    ac_multiply,
    ac_power,
    evaluate_word,
    finite_quotient,
    holonomy,
    project_to_quotient,
    random_element,
)
from twistedconj.linalg import Matrix, det
from twistedconj.nilgroup import lambda_rep

from .strategies import specs, specs_and_elements

ALPHA3 = ACElement((0, 0, 0), 1)


def d3f2(*k):
    return ACGroupSpec(Family.D3F2, k)


class TestMultiply:
    def test_alpha_squared(self):
        spec = d3f2(1, 0, 0, 1)
        assert ac_multiply(spec, ALPHA3, ALPHA3) == ACElement((1, 0, 0), 0)

    def test_alpha_e2(self):
        spec = d3f2(1, 0, 0, 1)
        e2 = ACElement((0, 1, 0), 0)
        assert ac_multiply(spec, ALPHA3, e2) == ACElement((0, -1, 0), 1)

    def test_alpha_e3(self):
        spec = d3f2(2, 1, 3, 1)
        e3 = ACElement((0, 0, 1), 0)
        # alpha e3 = e1^k3 e3^-1 alpha
        assert ac_multiply(spec, ALPHA3, e3) == ACElement((3, 0, -1), 1)

    def test_wrong_shape(self):
        with pytest.raises(SpecMismatch):
            ac_multiply(d3f2(1, 0, 0, 1), ACElement((0, 0), 0), ALPHA3)

    @given(specs_and_elements(1))
    def test_identity(self, args):
        spec, x = args
        assert ac_multiply(spec, x, spec.identity) == x
        assert ac_multiply(spec, spec.identity, x) == x

    @given(specs_and_elements(1))
    def test_inverse(self, args):
        spec, x = args
        assert ac_multiply(spec, x, ac_inverse(spec, x)) == spec.identity
        assert ac_multiply(spec, ac_inverse(spec, x), x) == spec.identity

    @given(specs_and_elements(3))
    def test_associative(self, args):
        spec, x, y, z = args
        assert ac_multiply(spec, ac_multiply(spec, x, y), z) == \
            ac_multiply(spec, x, ac_multiply(spec, y, z))

    @given(specs_and_elements(1), st.integers(-4, 4))
    def test_power(self, args, n):
        spec, x = args
        acc = spec.identity
        step = x if n >= 0 else ac_inverse(spec, x)
        for _ in range(abs(n)):
            acc = ac_multiply(spec, acc, step)
        assert ac_power(spec, x, n) == acc


class TestLambda:
    def test_alpha_squared_is_e1(self):
        spec = d3f2(0, 0, 0, 1)
        a = ac_lambda(spec, ALPHA3)
        assert a @ a == lambda_rep(spec.nil, (1, 0, 0))

    def test_family_345_entry(self):
        for fam, nu in ((Family.D4F3, 0), (Family.D4F4, 0), (Family.D4F5, 1)):
            spec = ACGroupSpec(fam, (2, 0, 0, 1))
            assert spec.lambda_alpha[1, 2] == -nu

    @given(specs_and_elements(2))
    def test_homomorphism(self, args):
        spec, x, y = args
        assert ac_lambda(spec, ac_multiply(spec, x, y)) == ac_lambda(spec, x) @ ac_lambda(spec, y)

    @given(specs_and_elements(2))
    def test_injective(self, args):
        spec, x, y = args
        if x != y:
            assert ac_lambda(spec, x) != ac_lambda(spec, y)


class TestRelations:
    @given(specs())
    def test_presentation_holds(self, spec):
        for name, lhs, rhs in spec.relations():
            assert evaluate_word(spec, spec.generators, lhs) == \
                evaluate_word(spec, spec.generators, rhs), name

    def test_relation_count(self):
        assert len(d3f2(1, 0, 0, 1).relations()) == 3 + 3 + 1
        assert len(ACGroupSpec(Family.D3F1, (1,)).relations()) == 3


class TestHolonomy:
    def test_d3f2_block(self):
        k = (3, 1, 2, 1)
        F = holonomy(d3f2(*k))
        assert F.order == 2
        assert F.matrices[0][1] == Matrix.identity(3)
        assert F.matrices[1][1] == Matrix.of([[1, 1, 2], [0, -1, 0], [0, 0, -1]])

    def test_trigonal_cube(self):
        for fam in (Family.D4F143, Family.D4F146):
            for k1 in (1, 2, 3):
                A = holonomy(ACGroupSpec(fam, (k1, 1, -1, 2))).matrices[1][1]
                assert A**3 == Matrix.identity(4)

    @given(specs())
    def test_is_a_group(self, spec):
        F = holonomy(spec)
        mats = [A for _, A in F]
        assert len(mats) == spec.order
        for A in mats:
            assert det(A) in (1, -1)
            for B in mats:
                assert A @ B in mats
            assert A.inverse() in mats


class TestQuotients:
    def test_project_examples(self):
        spec = d3f2(1, 0, 0, 1)
        assert project_to_quotient(spec, ACElement((3, 0, 0), 1)) == ((0, 0), 1)
        assert project_to_quotient(spec, ACElement((0, 1, 1), 1)) == ((1, 1), 1)

    @given(specs_and_elements(2), st.integers(-3, 3))
    def test_project_respects_products(self, args, a):
        # the projection of xy depends only on the projections of x and y
        spec, x, y = args
        x2 = ac_multiply(spec, x, ACElement((a,) + (0,) * (spec.rank - 1), 0))
        assert project_to_quotient(spec, ac_multiply(spec, x, y)) == \
            project_to_quotient(spec, ac_multiply(spec, x2, y))

    def test_finite_quotient_order(self):
        q = finite_quotient(d3f2(0, 0, 0, 1), (4, 2, 2))
        assert q.order == 32 == len(q.elements)

    def test_finite_quotient_homomorphism(self):
        spec = d3f2(1, 1, 0, 1)
        q = finite_quotient(spec, (2, 4, 4))
        rng = random.Random(3)
        assert q.project(spec.identity) == q.project(ACElement((2, 4, -8), 0))
        for _ in range(1000):
            x, y = random_element(spec, rng, 9), random_element(spec, rng, 9)
            assert q.project(ac_multiply(spec, x, y)) == q.multiply(q.project(x), q.project(y))

    def test_not_admissible(self):
        # [e3, e2] = e1 so e1 must have modulus dividing the lattice moduli
        with pytest.raises(NotAdmissible):
            finite_quotient(d3f2(1, 0, 0, 1), (4, 2, 2))

    def test_parameter_count(self):
        with pytest.raises(ValueError):
            ACGroupSpec(Family.D4F2, (1, 2, 3))
