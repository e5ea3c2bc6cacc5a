from fractions import Fraction

import pytest
from gmpy2 import mpfr

from qbilat.catalog import LimitParams
from qbilat.errors import DomainError, InsufficientDataError, PoleError
from qbilat.limits import (
    horn_anchor,
    limit_report,
    mainlim2_lhs_via_H,
    mainlim2_rhs,
    normalized_side,
    q_sequence,
    richardson_extrapolate,
    weighted_side,
)
from qbilat.qseries import QBase
from qbilat.values import RationalComplex

R = RationalComplex.parse
LP = LimitParams(R("1"), R("-1"))


def test_q_sequence():
    seq = q_sequence(3, 5)
    assert [k for k, _ in seq] == [3, 4, 5]
    assert seq[0][1].q_value_exact() == Fraction(7, 8)
    with pytest.raises(ValueError):
        q_sequence(4, 3)


def test_richardson_exact_on_polynomials(ctx):
    def f(e):
        return 3 - 2 * e + 5 * e**2 - e**3

    pts = [(Fraction(1, 2**k), f(Fraction(1, 2**k))) for k in range(1, 7)]
    r = richardson_extrapolate(pts, 3, ctx)
    with ctx.local():
        assert abs(r.value - 3) < mpfr(2) ** -240
    with pytest.raises(InsufficientDataError):
        richardson_extrapolate(pts[:2], 3, ctx)


def test_closed_forms(ctx):
    with ctx.local():
        assert abs(mainlim2_rhs(LP, ctx) - 8) < mpfr(2) ** -240
        assert abs(horn_anchor(LP, ctx) - 16) < mpfr(2) ** -240
        h = mainlim2_lhs_via_H(LP, ctx, max_terms=10**5)
        assert abs(h.value - 16) <= h.err + mpfr(2) ** -200


def test_anchor_ratio_for_noninteger_b(ctx):
    lp = LimitParams(R("1.7"), R("0.6+0.8i"))
    with ctx.local():
        ratio = horn_anchor(lp, ctx) / mainlim2_rhs(lp, ctx)
        assert abs(ratio - 2) < mpfr(2) ** -200


def test_weighted_side_pole_at_integer_b(ctx):
    with pytest.raises(PoleError):
        weighted_side("lhs", "COR1", LP, QBase.from_q("7/8"), ctx)
    with pytest.raises(DomainError):
        normalized_side("lhs", "MAIN1", LP, QBase.from_q("7/8"), ctx)


def test_small_table(ctx):
    table = limit_report(LP, k_min=3, k_max=6, ctx=ctx, order=2)
    assert len(table.rows) == 4 and table.exhausted is None
    assert table.max_ratio_deviation < mpfr("1e-60")
    # derived quantities keep the table's precision, not the 53-bit default
    assert table.constant.precision == (256, 256)
    assert table.rows[0].ratio.precision == (256, 256)
    assert table.ratio_within_bounds(ctx)
    with ctx.local():
        assert abs(table.constant - 1) < mpfr("0.05")
        assert abs(table.stated_ratio - 2) < mpfr(2) ** -200
    rec = table.to_record()
    assert rec["complete"] is True and len(rec["rows"]) == 4
    assert table.to_csv().splitlines()[0].startswith("k,q,lhs_re")


def test_budget_exhaustion_keeps_partial_table(ctx):
    table = limit_report(LP, k_min=3, k_max=8, ctx=ctx, order=1, max_terms=2000)
    assert table.exhausted is not None
    assert 0 < len(table.rows) < 6
    assert table.to_record()["complete"] is False


def test_limit_domain(ctx):
    with pytest.raises(DomainError):
        limit_report(LimitParams(R("1"), R("1")), ctx=ctx)
    with pytest.raises(DomainError):
        limit_report(LimitParams(R("-1"), R("-1")), ctx=ctx)
    with pytest.raises(InsufficientDataError):
        limit_report(LP, k_min=3, k_max=4, ctx=ctx, order=3)
