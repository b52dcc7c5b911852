import random
from fractions import Fraction

import mpmath
import pytest

from wittkit.algrec import (
    IntPoly,
    _lovasz_verify,
    certify_vector,
    class_polynomial,
    exact_divisibility,
    exact_minpoly_nf,
    lll_reduce,
    minpoly,
)
from wittkit.domains import BigComplex
from wittkit.errors import UsageError, WittkitError
from wittkit.modular import JFamily, modular_vector
from wittkit.qfield import QuadElement, enumerate_ideals, make_field
from wittkit.witt import WittVector, constant_vector

K5 = make_field(-5)


def test_lll_knapsack_identity():
    # the second row is huge but the lattice is unimodular, so the reduced
    # basis must consist of unit vectors
    red = lll_reduce([[1, 0], [10**9, 1]])
    assert sorted(sorted(abs(c) for c in row) for row in red) == [[0, 1], [0, 1]]


def test_lll_output_satisfies_lovasz():
    rng = random.Random(31)
    for _ in range(10):
        basis = [[rng.randrange(-50, 51) for _ in range(3)] for _ in range(3)]
        while abs(
            basis[0][0] * (basis[1][1] * basis[2][2] - basis[1][2] * basis[2][1])
            - basis[0][1] * (basis[1][0] * basis[2][2] - basis[1][2] * basis[2][0])
            + basis[0][2] * (basis[1][0] * basis[2][1] - basis[1][1] * basis[2][0])
        ) < 1:
            basis = [[rng.randrange(-50, 51) for _ in range(3)] for _ in range(3)]
        red = lll_reduce(basis)
        _lovasz_verify(red, Fraction(99, 100))


def test_lovasz_verify_rejects_unordered_basis():
    with pytest.raises(WittkitError):
        _lovasz_verify([[10, 0], [0, 1]], Fraction(99, 100))


def test_lll_dependent_rows_rejected():
    with pytest.raises(UsageError):
        lll_reduce([[1, 2], [2, 4]])


def test_intpoly_rejects_degenerate():
    with pytest.raises(UsageError):
        IntPoly((5,), 0.0)
    with pytest.raises(UsageError):
        IntPoly((1, 2, 0), 0.0)


def test_minpoly_golden_ratio():
    with mpmath.workdps(80):
        x = (1 + mpmath.sqrt(5)) / 2
    p = minpoly(x, 4, prec=60)
    assert p is not None
    assert p.coeffs == (-1, -1, 1)
    assert p.is_monic


def test_minpoly_rational_integer():
    p = minpoly(mpmath.mpf(1728), 4, prec=60)
    assert p is not None
    assert p.coeffs == (-1728, 1)


def test_minpoly_zeta3():
    with mpmath.workdps(80):
        z = mpmath.exp(2j * mpmath.pi / 3)
    p = minpoly(z, 4, prec=60)
    assert p is not None
    assert p.coeffs == (1, 1, 1)


def test_minpoly_half_is_not_monic():
    p = minpoly(mpmath.mpf("0.5"), 4, prec=60)
    assert p is not None
    assert p.coeffs == (-1, 2)
    assert not p.is_monic


def test_minpoly_sqrt2_plus_sqrt3():
    with mpmath.workdps(90):
        x = mpmath.sqrt(2) + mpmath.sqrt(3)
    p = minpoly(x, 6, prec=70)
    assert p is not None
    assert p.coeffs == (1, 0, -10, 0, 1)


def test_minpoly_rejects_pi():
    with mpmath.workdps(80):
        assert minpoly(mpmath.pi, 6, prec=60) is None


def test_class_polynomial_class_number_one():
    assert class_polynomial(-1).poly.coeffs == (-1728, 1)
    assert class_polynomial(-3).poly.coeffs == (0, 1)
    assert class_polynomial(-7).poly.coeffs == (3375, 1)


def test_class_polynomial_d5():
    rep = class_polynomial(-5)
    assert rep.h == 2
    assert rep.poly.coeffs == (-681472000, -1264000, 1)
    assert max(rep.rounding_errors) < 0.01
    # the recorded numeric j values must actually be roots
    with mpmath.workdps(130):
        for jv in rep.j_values:
            assert abs(jv * jv - 1264000 * jv - 681472000) < mpmath.mpf(10) ** -80


def test_class_polynomial_d15():
    rep = class_polynomial(-15)
    assert rep.poly.coeffs == (-121287375, 191025, 1)
    assert max(rep.rounding_errors) < 0.01


def test_certify_modular_vector_d5():
    xi = modular_vector(JFamily(), K5, 30, 120)
    rep = certify_vector(xi, dmax=8)
    assert rep.ok
    assert rep.all_integral
    assert rep.poly.coeffs == (-681472000, -1264000, 1)
    exact = {tuple(rep.vector.value_at(a)) for a in rep.vector.ideals()}
    assert len(exact) == 2
    nf = rep.vector.domain
    with mpmath.workdps(130):
        for a in rep.vector.ideals():
            emb = nf.numeric(rep.vector.value_at(a))
            assert abs(emb - xi.value_at(a)) < mpmath.mpf(10) ** -50


def test_certify_constant_rational():
    xi = constant_vector(K5, BigComplex(60), 10, mpmath.mpc(7))
    rep = certify_vector(xi, dmax=4)
    assert rep.ok
    assert rep.poly.coeffs == (-7, 1)
    assert rep.all_integral


def test_certify_half_is_algebraic_but_not_integral():
    xi = constant_vector(K5, BigComplex(60), 10, mpmath.mpc("0.5"))
    rep = certify_vector(xi, dmax=4)
    assert rep.ok
    assert not rep.all_integral
    assert rep.value_polys[0].coeffs == (-1, 2)


def test_certify_compositum_of_two_quadratics():
    ideals = enumerate_ideals(K5, 6)
    with mpmath.workdps(75):
        vals = {
            a: (mpmath.sqrt(2) if i % 2 == 0 else mpmath.sqrt(3))
            for i, a in enumerate(ideals)
        }
    xi = WittVector(K5, BigComplex(60), 6, values=vals)
    rep = certify_vector(xi, dmax=8)
    assert rep.ok
    assert rep.all_integral
    # Q(sqrt 2, sqrt 3) is generated by sqrt 2 + sqrt 3, whose minimal
    # polynomial is x^4 - 10 x^2 + 1
    assert rep.poly.coeffs == (1, 0, -10, 0, 1)
    nf = rep.vector.domain
    with mpmath.workdps(70):
        for i, a in enumerate(rep.vector.ideals()):
            target = mpmath.sqrt(2) if i % 2 == 0 else mpmath.sqrt(3)
            assert abs(nf.numeric(rep.vector.value_at(a)) - target) < mpmath.mpf(10) ** -40


def test_exact_minpoly_inside_number_field():
    rep = certify_vector(modular_vector(JFamily(), K5, 30, 120), dmax=8)
    nf = rep.vector.domain
    assert exact_minpoly_nf(nf, nf.from_fraction(Fraction(3, 1))) == (-3, 1)
    assert exact_minpoly_nf(nf, nf.gen()) == (-681472000, -1264000, 1)


def test_exact_divisibility_in_number_field():
    rep = certify_vector(modular_vector(JFamily(), K5, 30, 120), dmax=8)
    nf = rep.vector.domain
    two = QuadElement(K5, Fraction(2), Fraction(0))
    assert exact_divisibility(nf, nf.zero(), two)
    # theta satisfies x^2 - 1264000 x - 681472000, so theta/2 satisfies
    # x^2 - 632000 x - 170368000: still monic integral, hence divisible
    assert 1264000 % 2 == 0 and 681472000 % 4 == 0
    assert exact_divisibility(nf, nf.gen(), two)
    assert exact_divisibility(nf, nf.scale(nf.gen(), 2), two)
    # 1/2 is not an algebraic integer
    assert not exact_divisibility(nf, nf.one(), two)


def test_jhat_integral_across_fields():
    for d in (-1, -3, -7, -15):
        field = make_field(d)
        rep = certify_vector(modular_vector(JFamily(), field, 20, 120), dmax=8)
        assert rep.ok, d
        assert rep.all_integral, d
