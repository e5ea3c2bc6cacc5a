"""Cross-checks against mpmath as an independent oracle at fresh points."""

import mpmath
import pytest
from gmpy2 import mpc, mpfr

from qbilat.numeric import gamma, horn_closed_form
from qbilat.qseries import PsiSpec, QBase, psi_bilateral, q_gamma, qpoch_inf, theta_series

mpmath.mp.dps = 60
TOL = mpfr("1e-50")


def _ref(x):
    x = mpmath.mpc(x)
    return mpc(mpfr(mpmath.nstr(x.real, 60)), mpfr(mpmath.nstr(x.imag, 60)))


def _m(text):
    """The same literal as an mpmath number, at mpmath's working precision."""
    return mpmath.mpmathify(text.replace("i", "j"))


@pytest.mark.parametrize("a,q", [("0.25-0.6i", "0.45"), ("-1.3", "0.2"), ("2.5+1i", "0.8")])
def test_qpoch(a, q, ctx):
    ref = mpmath.qp(_m(a), mpmath.mpf(q))
    with ctx.local():
        assert abs(qpoch_inf(a, q, ctx).value - _ref(ref)) < TOL * max(1, abs(_ref(ref)))


@pytest.mark.parametrize("z,q", [("0.7+0.2i", "0.35"), ("2.25", "0.6")])
def test_q_gamma(z, q, ctx):
    ref = mpmath.qgamma(_m(z), mpmath.mpf(q))
    with ctx.local():
        assert abs(q_gamma(z, q, ctx).value - _ref(ref)) < TOL * max(1, abs(_ref(ref)))


@pytest.mark.parametrize("z", ["0.1+3.3i", "-4.7+0.2i", "12.5-1i"])
def test_gamma(z, ctx):
    ref = mpmath.gamma(_m(z))
    with ctx.local():
        assert abs(gamma(z, ctx) - _ref(ref)) < TOL * abs(_ref(ref))


def test_theta_direct_sum(ctx):
    q, z = mpmath.mpf("0.55"), mpmath.mpc("-0.4", "1.1")
    ref = mpmath.nsum(lambda n: q ** (n * n / 2) * (-z) ** n, [-mpmath.inf, mpmath.inf])
    with ctx.local():
        assert abs(theta_series("-0.4+1.1i", "0.55", ctx).value - _ref(ref)) < TOL


def test_ramanujan_direct_sum(ctx):
    q = mpmath.mpf("0.4")
    a, b, z = mpmath.mpc("1.2", "0.3"), mpmath.mpc("0.1", "-0.2"), mpmath.mpc("0.5", "0.2")

    def term(n):
        n = int(n)
        return mpmath.qp(a, q, n) / mpmath.qp(b, q, n) * z**n if n >= 0 else \
            mpmath.qp(q / b, q, -n) / mpmath.qp(q / a, q, -n) * (b / (a * z)) ** (-n)

    ref = mpmath.nsum(term, [0, mpmath.inf]) + mpmath.nsum(lambda m: term(-m), [1, mpmath.inf])
    got = psi_bilateral(PsiSpec(("1.2+0.3i",), ("0.1-0.2i",)), QBase.from_q("0.4"), "0.5+0.2i", ctx)
    with ctx.local():
        assert abs(got.value - _ref(ref)) < TOL


@pytest.mark.parametrize("a,c,w", [("-0.7", "2.9", "0.6+0.8i"), ("0.2", "2.4", "-0.28-0.96i")])
def test_horn_via_2f1(a, c, w, ctx):
    am, cm, wm = _m(a), _m(c), _m(w)
    ref = mpmath.hyp2f1(am, 1, cm, wm) + mpmath.hyp2f1(1 - cm, 1, 1 - am, 1 / wm) - 1
    with ctx.local():
        assert abs(horn_closed_form(a, c, w, ctx) - _ref(ref)) < TOL
