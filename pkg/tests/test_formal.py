import time
from fractions import Fraction

import pytest
from gmpy2 import mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from qbilat.catalog import ConstrainedParams, eval_side
from qbilat.errors import NotInvertibleError, PrecisionContractError
from qbilat.formal import (
    DEFAULT_POINTS,
    FORMAL_IDENTITIES,
    P,
    Q,
    FormalPairParams,
    FormalThetaParams,
    LaurentSeries,
    Mono,
    RationalParams,
    formal_check,
    formal_sides,
    ls_inv,
    ls_psi11,
    ls_qpoch_inf,
    ls_theta,
)
from qbilat.qseries import QBase
from qbilat.values import RationalComplex

F = Fraction


def poly(terms, order=None):
    return LaurentSeries.from_dict({k: F(v) for k, v in terms.items()}, order)


def test_mul_examples():
    x = poly({0: 1, 1: 1}, 2) * poly({0: 1, 1: -1}, 2)
    assert x == poly({0: 1, 2: -1}, 2)
    assert (poly({-1: 1}) * P.series()) == LaurentSeries.const(1)


def test_order_bookkeeping():
    x = poly({1: 1, 2: 3}, 5)
    y = poly({2: 2, 3: 1}, 3)
    prod = x * y
    # known through min(5 + 2, 3 + 1)
    assert prod.order == 4 and prod.valuation == 3
    assert (x + y).order == 3
    with pytest.raises(PrecisionContractError):
        y.coeff(4)


def test_inverse_examples():
    inv = ls_inv(poly({0: 1, 1: -1}, 3))
    assert inv == poly({0: 1, 1: 1, 2: 1, 3: 1}, 3)
    assert ls_inv(P.series()) == poly({-1: 1})
    with pytest.raises(NotInvertibleError):
        ls_inv(LaurentSeries.zero())
    with pytest.raises(NotInvertibleError):
        ls_inv(LaurentSeries.zero(5))
    with pytest.raises(PrecisionContractError):
        ls_inv(poly({0: 1, 1: 1}))


def test_inverse_order_adjusts_for_valuation():
    x = poly({2: 1, 3: 1}, 10)
    assert ls_inv(x).order == 10 - 4


def test_qpoch_examples():
    assert ls_qpoch_inf(Mono(1, 5), 1, 4) == LaurentSeries.const(1, 4)
    assert ls_qpoch_inf(P, 1, 3) == ((poly({0: 1, 1: -1}) * poly({0: 1, 3: -1})).truncate(3))
    assert ls_qpoch_inf(Q, 1, 4) == ((poly({0: 1, 2: -1}) * poly({0: 1, 4: -1})).truncate(4))
    with pytest.raises(PrecisionContractError):
        ls_qpoch_inf(Mono(1, -1), 1, 4)


def test_qpoch_with_base_q_squared():
    # (q; q^2)_inf through p^8: factors 1 - p^2, 1 - p^6
    assert ls_qpoch_inf(Q, 2, 8) == (poly({0: 1, 2: -1}) * poly({0: 1, 6: -1})).truncate(8)


@pytest.mark.parametrize("z", [F(2, 3), F(-5, 7)])
def test_theta_inversion_and_product(z):
    n = 30
    t = ls_theta(z, 1, n)
    assert (t - ls_theta(1 / z, 1, n)).is_zero()
    product = (ls_qpoch_inf(Q, 1, n) * ls_qpoch_inf(Mono(z, 1), 1, n)
               * ls_qpoch_inf(Mono(1 / z, 1), 1, n))
    assert (t - product).is_zero()


def test_theta_shift_equation():
    # theta(z q) = (-z)^-1 q^-1/2 theta(z); with z = c p^m both sides are monomial substitutions
    z = Mono(F(3, 4), 1)
    n = 30
    lhs = ls_theta(z * Q, 1, n)
    rhs = ls_theta(z, 1, n + 2) * Mono(F(-4, 3), -2).series()
    assert (lhs - rhs).truncate(n - 2).is_zero()


def test_psi_trivial_and_binomial():
    # b = q: the q-binomial series (az; q)_inf / (z; q)_inf
    a, z = F(2, 3), Mono(F(1, 5), 1)
    n = 20
    series = ls_psi11(a, Q, z, n)
    ratio = ls_qpoch_inf(z * a, 1, n) * ls_inv(ls_qpoch_inf(z, 1, n))
    assert (series - ratio).truncate(n).is_zero()


def test_psi_preconditions():
    with pytest.raises(PrecisionContractError):
        ls_psi11(F(1, 2), Q, Mono(1, 0), 10)
    with pytest.raises(PrecisionContractError):
        ls_psi11(F(1, 2), F(1, 3), Mono(1, 1), 10)


def test_ramanujan_two_orders():
    params = RationalParams(F(2, 3), F(1, 5))
    lo, hi = formal_sides("RAMANUJAN", params, 20), formal_sides("RAMANUJAN", params, 40)
    assert (lo[0] - lo[1]).truncate(20).is_zero()
    assert (hi[0] - hi[1]).truncate(min(hi[0].order, hi[1].order, 40)).is_zero()
    assert (hi[0].truncate(20) - lo[0].truncate(20)).is_zero()
    assert formal_check("RAMANUJAN", params, 40).passed


def test_registry_of_formal_identities():
    assert len(FORMAL_IDENTITIES) == 16


@pytest.mark.parametrize("tag", ["MAIN1", "MAIN2", "COR1", "COR2", "CO5", "COROL1", "CO6",
                                 "CO7", "CORO1", "QBINOM"])
def test_true_identities_formal(tag):
    rep = formal_check(tag, RationalParams(F(2, 3), F(1, 5)), 30)
    assert rep.passed and rep.first_failing_order is None


@pytest.mark.parametrize("tag", ["JTP", "THETA_INV", "THETA_QDIFF"])
@pytest.mark.parametrize("k", [-2, -1, 1, 2])
def test_theta_formal(tag, k):
    assert formal_check(tag, FormalThetaParams(F(2, 3), k), 30).passed


def test_false_statements_report_first_order():
    rep = formal_check("P1", FormalPairParams(F(2, 3), F(1, 5)), 20)
    assert not rep.passed and rep.first_failing_order == 1
    assert rep.coefficient == F(-91, 30)
    rep = formal_check("CORO2", RationalParams(F(2, 3), F(1, 5)), 20)
    assert not rep.passed and rep.first_failing_order == 1
    rec = rep.to_record()
    assert rec["status"] == "fail" and rec["first_failing_order"] == 1


def test_order_zero_and_monotone():
    params = DEFAULT_POINTS[1]
    assert formal_check("MAIN1", params, 0).passed
    rep = formal_check("P1", FormalPairParams(F(2, 3), F(1, 5)), 0)
    assert rep.passed
    for n in (1, 5, 10):
        assert formal_check("MAIN2", params, n).passed


def test_main_theorems_at_default_points():
    start = time.monotonic()
    for params in DEFAULT_POINTS:
        for tag in ("MAIN1", "MAIN2"):
            assert formal_check(tag, params, 50).passed
    assert time.monotonic() - start < 60


@pytest.mark.parametrize("tag", ["MAIN1", "MAIN2", "COR1", "CO5"])
def test_numeric_formal_agreement(tag, ctx):
    # coefficients grow like (1/(beta w))^k = 7.5^k, so p = 1/20 leaves a tail near 0.375^41
    params = RationalParams(F(2, 3), F(1, 5))
    lhs, _ = formal_sides(tag, params, 40)
    base = QBase.from_p("1/20")
    cp = ConstrainedParams(RationalComplex(params.beta), RationalComplex(params.w), base)
    num = eval_side(tag, "lhs", cp, ctx)
    formal_value = lhs.truncate(40).evaluate(F(1, 20))
    with ctx.local():
        diff = abs(num.value - mpfr(formal_value.numerator) / formal_value.denominator)
        assert diff <= num.err + mpfr("1e-14") * max(abs(num.value), 1)


small = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def series(draw):
    start = draw(st.integers(-2, 2))
    coeffs = draw(st.lists(small, min_size=1, max_size=6))
    order = draw(st.integers(start + 3, start + 8))
    return LaurentSeries(start, coeffs, order)


@settings(max_examples=60, deadline=None)
@given(series(), series(), series())
def test_algebra_properties(x, y, z):
    assert x * y == y * x
    assert (x * y) * z == x * (y * z) or (x * y) * z == (x * (y * z)).truncate(((x * y) * z).order)
    assert x + y == y + x


@settings(max_examples=60, deadline=None)
@given(series())
def test_double_inverse(x):
    if x.is_zero():
        return
    back = ls_inv(ls_inv(x))
    assert (back - x.truncate(back.order)).is_zero()
