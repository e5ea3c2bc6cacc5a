import gmpy2
import pytest
from gmpy2 import mpc, mpfr

from qbilat.errors import BranchPointError, DomainError, PoleError
from qbilat.numeric import (
    Approx,
    PrecisionContext,
    cpow_principal,
    dougall_closed_form,
    eval_1H1,
    eval_2H2,
    gamma,
    horn_closed_form,
    principal_log,
    shifted_factorial,
)

# mpmath at 50 digits, frozen
GAMMA_ORACLE = {
    "0.5+0.25i": ("1.3851135919886662146926284179954497795085952103443",
                  "-0.67318153575969973919488505202024646624837017221152"),
    "-2.5+0.1i": ("-0.89650770119975878162212263984237899043135814750946",
                  "-0.099318350500568554157708987583194202706321463394194"),
    "7.25-3i": ("543.32807551791771094566063642903156580881438381552",
                "268.42399878597702941499461817624702383579879327706"),
}

# 1H1(a; c; w) by hypergeometric 2F1 splitting, mpmath at 50 digits, frozen
HORN_ORACLE = {
    ("-0.3", "1.6", "-1"): ("1.5558937871226565070782673336221896152551485620962", "0"),
    ("-0.3", "1.6", "i"): ("1.1075107856090852408300440924891239876101617806486",
                           "0.26588981507687362132255870049663152963031385753518"),
    ("-0.3", "1.6", "e2i"): ("1.3125518167673525065028623662630547407162367776782",
                             "0.22698286390667966438129524050285803612233547161472"),
    ("-1.2", "3.4", "-1"): ("2.9765003243176576763685549905295528537261540261257", "0"),
    ("-1.2", "3.4", "i"): ("0.50242428982340531435577513065364612347718409052639",
                           "0.69152770891850409782854374162651154015009744814616"),
    ("-1.2", "3.4", "e2i"): ("1.2383364008260086818089099724668478339147964509893",
                             "1.0115854136586051999582793909222453720515739643381"),
}
DOUGALL_ORACLE = "1.5280974030762442296274756313847882050926893824606"


def _point(w, ctx):
    with ctx.local():
        return gmpy2.exp(mpc(0, 2)) if w == "e2i" else w


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(32)
    with pytest.raises(ValueError):
        PrecisionContext(128, guard=128)
    ctx = PrecisionContext(128)
    with ctx.local():
        assert gmpy2.get_context().precision == 128
        assert ctx.tol == mpfr(2) ** -112
    assert ctx.doubled().bits == 256


def test_approx_error_propagation(ctx):
    with ctx.local():
        x = Approx(mpc(2), mpfr("1e-10"))
        y = Approx(mpc(3), mpfr("1e-10"))
        s = x + y
        assert s.value == 5 and s.err >= mpfr("2e-10")
        m = x * y
        assert m.value == 6 and m.err >= mpfr("5e-10")
        d = x / y
        assert d.err >= mpfr("1e-10") * (2 + 3) / 9 * mpfr(0.99)
        with pytest.raises(PoleError):
            x / Approx(mpc(0), mpfr(0))
        with pytest.raises(PoleError):
            x / Approx(mpc("1e-12"), mpfr("1e-10"))


def test_principal_branch(ctx):
    with ctx.local():
        assert principal_log(mpc(-1)).imag == gmpy2.const_pi()
        assert principal_log(mpc(-1, -0.0)).imag == gmpy2.const_pi()
        with pytest.raises(BranchPointError):
            principal_log(0)
        assert cpow_principal(-8, mpfr(1) / 3, ctx).imag > 0
        assert cpow_principal(-2, 3, ctx) == -8
        assert cpow_principal(0, 2, ctx) == 0
        with pytest.raises(BranchPointError):
            cpow_principal(0, -1, ctx)


@pytest.mark.parametrize("z", sorted(GAMMA_ORACLE))
def test_gamma_oracle(z, ctx):
    re, im = GAMMA_ORACLE[z]
    with ctx.local():
        g = gamma(z, ctx)
        ref = mpc(mpfr(re), mpfr(im))
        assert abs(g - ref) <= mpfr("1e-45") * abs(ref)


def test_gamma_integers_and_poles(ctx):
    with ctx.local():
        assert gamma(5, ctx) == 24
        assert abs(gamma("1/2", ctx) ** 2 - gmpy2.const_pi()) < mpfr(2) ** -240
        for n in (0, -1, -7):
            with pytest.raises(PoleError):
                gamma(n, ctx)


def test_gamma_precision_scales():
    hi = PrecisionContext(1024)
    with hi.local():
        g = gamma("1/3", hi)
        # Gamma(1/3) Gamma(2/3) = 2 pi / sqrt(3)
        ref = 2 * gmpy2.const_pi() / gmpy2.sqrt(3)
        assert abs(g * gamma("2/3", hi) - ref) < mpfr(2) ** -1000


def test_shifted_factorial(ctx):
    with ctx.local():
        assert shifted_factorial(3, 4, ctx) == 3 * 4 * 5 * 6
        assert shifted_factorial(mpfr(0.5), 0, ctx) == 1
        assert shifted_factorial(5, -2, ctx) == mpc(1) / (4 * 3)
        with pytest.raises(PoleError):
            shifted_factorial(2, -3, ctx)


def test_1h1_finite_sum(ctx):
    # a = -1 cuts the positive side; the negative side telescopes to 2 at z = -1
    r = eval_1H1(-1, 2, -1, ctx)
    with ctx.local():
        assert abs(r.value - 2) <= r.err + mpfr(2) ** -200


@pytest.mark.parametrize("key", sorted(HORN_ORACLE))
def test_horn_closed_form_oracle(key, ctx):
    a, c, w = key
    re, im = HORN_ORACLE[key]
    with ctx.local():
        v = horn_closed_form(a, c, _point(w, ctx), ctx)
        assert abs(v - mpc(mpfr(re), mpfr(im))) < mpfr("1e-45")


@pytest.mark.parametrize("key", sorted(HORN_ORACLE))
def test_1h1_series_matches_oracle(key, ctx):
    a, c, w = key
    re, im = HORN_ORACLE[key]
    r = eval_1H1(a, c, _point(w, ctx), ctx, max_terms=10**5, tol=1e-8)
    with ctx.local():
        actual = abs(r.value - mpc(mpfr(re), mpfr(im)))
        assert actual <= r.err
        assert r.err < mpfr("1e-6")
    assert r.terms <= 10**5


def test_dougall(ctx):
    with ctx.local():
        v = dougall_closed_form("0.1", "0.2", "1.5", "1.7", ctx)
        assert abs(v - mpfr(DOUGALL_ORACLE)) < mpfr("1e-45")
    r = eval_2H2("0.1", "0.2", "1.5", "1.7", 1, ctx, max_terms=10**5, tol=1e-8)
    with ctx.local():
        assert abs(r.value - mpfr(DOUGALL_ORACLE)) <= r.err < mpfr("1e-6")


def test_2h2_finite_case(ctx):
    r = eval_2H2(-1, -1, 2, 2, 1, ctx)
    with ctx.local():
        assert abs(r.value - mpfr(1.5)) <= r.err + mpfr(2) ** -200
        assert abs(dougall_closed_form(-1, -1, 2, 2, ctx) - mpfr(1.5)) < mpfr(2) ** -200


def test_bilateral_domain_errors(ctx):
    with pytest.raises(DomainError):
        eval_1H1("-0.3", "1.6", 1, ctx)
    with pytest.raises(DomainError):
        eval_1H1("-0.3", "1.6", "0.5", ctx)
    with pytest.raises(DomainError):
        eval_1H1("0.5", "1.2", -1, ctx)
    with pytest.raises(DomainError):
        horn_closed_form("0.5", "1.2", -1, ctx)
    with pytest.raises(DomainError):
        dougall_closed_form("0.5", "0.5", "1", "1", ctx)
