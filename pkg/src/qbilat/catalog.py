"""Registry of q-series identities with numeric evaluation of both sides,
domain checks, a fixed tolerance policy and seeded parameter scans.

Each identity is identified by a tag such as ``MAIN1`` or ``JTP``.  The
registry entry records a one-line title, the statement in plain notation and
whether the statement is expected to hold as written.  Statements that fail
as written stay in the registry unchanged so their failure can be shown.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from enum import Enum
from fractions import Fraction
from typing import Callable

from gmpy2 import mpc, mpfr

from .errors import BudgetError, DomainError, PoleError, PrecisionError, QBilatError
from .numeric import (
    Approx,
    PrecisionContext,
    cpow_principal,
    dougall_closed_form,
    eval_1H1,
    eval_2H2,
    horn_closed_form,
)
from .qseries import (
    PsiSpec,
    QBase,
    psi_bilateral,
    qpoch_inf,
    qpoch_multi,
    ramanujan_rhs,
    theta_product,
    theta_series,
    theta_shift,
)
from .values import RationalComplex, format_mpc, format_mpfr, to_mpc


class IdentityId(str, Enum):
    MAIN1 = "MAIN1"
    MAIN2 = "MAIN2"
    COR1 = "COR1"
    COR2 = "COR2"
    LEM1 = "LEM1"
    CO3 = "CO3"
    CORL3 = "CORL3"
    P1 = "P1"
    CO4 = "CO4"
    CORL4 = "CORL4"
    CO5 = "CO5"
    COROL1 = "COROL1"
    CO6 = "CO6"
    CO7 = "CO7"
    CORO1 = "CORO1"
    CORO2 = "CORO2"
    PHYS1 = "PHYS1"
    PHYS2 = "PHYS2"
    RAMANUJAN = "RAMANUJAN"
    QBINOM = "QBINOM"
    JTP = "JTP"
    THETA_INV = "THETA_INV"
    THETA_QDIFF = "THETA_QDIFF"
    HORN = "HORN"
    DOUGALL = "DOUGALL"
    LIMIT_MAIN = "LIMIT_MAIN"

    def __str__(self) -> str:
        return self.value


def as_identity(tag) -> IdentityId:
    try:
        return tag if isinstance(tag, IdentityId) else IdentityId(str(tag).upper())
    except ValueError:
        raise DomainError(f"unknown identity {tag!r}") from None


# ---------------------------------------------------------------------------
# parameter records

Scalar = RationalComplex | mpc


def _fmt_scalar(x) -> str:
    if isinstance(x, RationalComplex):
        return str(x)
    if isinstance(x, mpc):
        re_part = format_mpfr(x.real, 30)
        im_part = format_mpfr(x.imag, 30)
        sign = "" if im_part.startswith("-") else "+"
        return f"{re_part}{sign}{im_part}i"
    return str(x)


class _Record:
    def to_record(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = v if isinstance(v, int) and not isinstance(v, bool) else _fmt_scalar(v)
        return out


@dataclass(frozen=True)
class ConstrainedParams(_Record):
    """``beta``, ``w`` and the base; ``alpha = -1/beta^2`` and ``gamma = q/beta``."""

    beta: Scalar
    w: Scalar
    base: QBase
    case: int = 1


@dataclass(frozen=True)
class PhysicsParams(_Record):
    """Fugacities ``a`` and ``w``; ``a^(1/2)`` is the principal root."""

    a: Scalar
    w: Scalar
    base: QBase


@dataclass(frozen=True)
class PairParams(_Record):
    xi: Scalar
    eta: Scalar
    base: QBase
    case: int = 1


@dataclass(frozen=True)
class ThetaParams(_Record):
    z: Scalar
    base: QBase
    k: int = 1


@dataclass(frozen=True)
class PsiParams(_Record):
    a: Scalar
    b: Scalar
    z: Scalar
    base: QBase


@dataclass(frozen=True)
class BinomialParams(_Record):
    a: Scalar
    z: Scalar
    base: QBase


@dataclass(frozen=True)
class HornParams(_Record):
    a: Scalar
    c: Scalar
    z: Scalar


@dataclass(frozen=True)
class DougallParams(_Record):
    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar


@dataclass(frozen=True)
class LimitParams(_Record):
    """Exponent ``b > 0`` and a point ``w`` on the unit circle, ``w != 1``."""

    b: Scalar
    w: Scalar


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class IdentityInfo:
    tag: IdentityId
    title: str
    statement: str
    params: type
    cases: int = 1
    uses_base: bool = True
    holds: bool = True
    defect: str = ""


_C = ConstrainedParams
_R = IdentityId
_CONSTRAINED_NOTE = "alpha beta^2 = -1, beta gamma = q, z = gamma w / (alpha q^(1/2))"
_BR1 = "(beta gamma w/q^(1/2), q^(3/2)/(beta gamma w), 1/beta, q beta; q)"
_BR2 = "(gamma w/(alpha beta q^(1/2)), alpha beta q^(3/2)/(gamma w), alpha beta, q/(alpha beta); q)"

REGISTRY: dict[IdentityId, IdentityInfo] = {
    info.tag: info
    for info in [
        IdentityInfo(
            _R.MAIN1, "two 1psi1 series with base q summed to q^2 products (sum)",
            "1/2 (q;q^2)/(q^2;q^2) [ (gamma/alpha;q)/(alpha beta;q) 1psi1(alpha beta; gamma/alpha; q, z)"
            " + (beta^2 gamma;q)/(1/beta;q) 1psi1(1/beta; beta^2 gamma; q, z) ]"
            " = (gamma/(alpha^2 beta);q^2)/(alpha^2 beta^2;q^2)"
            " (alpha q^(3/2)/(gamma w), alpha beta w q^(1/2);q^2)"
            " / (gamma w/(alpha q^(1/2)), q^(1/2)/(alpha beta w);q^2); " + _CONSTRAINED_NOTE, _C),
        IdentityInfo(
            _R.MAIN2, "two 1psi1 series with base q summed to q^2 products (difference)",
            "1/2 (q;q^2)/(q^2;q^2) [ first term - second term ]"
            " = alpha beta (gamma/(alpha^2 beta);q^2)/(alpha^2 beta^2;q^2)"
            " (alpha q^(5/2)/(gamma w), alpha beta w q^(3/2);q^2)"
            " / (gamma w q^(1/2)/alpha, q^(3/2)/(alpha beta w);q^2); " + _CONSTRAINED_NOTE, _C),
        IdentityInfo(
            _R.COR1, "sum form with (q^2;q^2)/(q;q^2) moved to the product side",
            "1/2 [ first term + second term ] = (q^2;q^2)/(q;q^2) x (right side of MAIN1)", _C),
        IdentityInfo(
            _R.COR2, "difference form with (q^2;q^2)/(q;q^2) moved to the product side",
            "1/2 [ first term - second term ] = (q^2;q^2)/(q;q^2) x (right side of MAIN2)", _C),
        IdentityInfo(
            _R.LEM1, "inversion symmetry of theta with base q^2",
            "case 1: theta_{q^2}(xi eta) = 1/2 [theta_{q^2}(xi eta) + theta_{q^2}(1/(xi eta))];"
            " case 2: the same with xi/eta", PairParams, cases=2),
        IdentityInfo(
            _R.CO3, "reciprocal theta_{q^2} product, inversion-symmetrised",
            "1/(theta_{q^2}(x/w) theta_{q^2}(x w)) = 4 / ([theta_{q^2}(x/w) + theta_{q^2}(w/x)]"
            " [theta_{q^2}(x w) + theta_{q^2}(1/(x w))]), x = alpha beta / q^(1/2)", _C),
        IdentityInfo(
            _R.CORL3, "reciprocal theta_{q^2} product, inversion-symmetrised, shifted by q",
            "as CO3 with x = alpha beta q^(1/2)", _C),
        IdentityInfo(
            _R.P1, "product of two theta_{q^2} as a product of two theta_q (as stated)",
            "theta_{q^2}(xi/eta) theta_{q^2}(xi eta) = theta_q(xi) theta_q(-eta)", PairParams,
            holds=False,
            defect="false as stated: the double sum over (N, M) = (n+m, n-m) keeps only N = M"
            " mod 2, and the odd pairs contribute"
            " -xi q^(1/2) theta_{q^2}(q xi/eta) theta_{q^2}(q xi eta)"),
        IdentityInfo(
            _R.CO4, "four specialisations of the two-base theta product, x = alpha beta/q^(1/2)",
            "case 1: theta_{q^2}(x/w) theta_{q^2}(x w) = theta_q(x) theta_q(-w);"
            " case 2: theta_{q^2}(x/w) theta_{q^2}(1/(x w)) = theta_q(w) theta_q(-1/x);"
            " case 3: theta_{q^2}(w/x) theta_{q^2}(x w) = theta_q(w) theta_q(-1/x);"
            " case 4: theta_{q^2}(w/x) theta_{q^2}(1/(x w)) = theta_q(x) theta_q(-w)", _C, cases=4,
            holds=False, defect="instances of P1, which is false as stated"),
        IdentityInfo(
            _R.CORL4, "four specialisations of the two-base theta product, x = alpha beta q^(1/2)",
            "as CO4 with x = alpha beta q^(1/2) and -x in place of -1/x in cases 2 and 3", _C,
            cases=4, holds=False, defect="instances of P1, which is false as stated"),
        IdentityInfo(
            _R.CO5, "reciprocal theta_{q^2} product as a sum of theta_q products",
            "1/(theta_{q^2}(x/w) theta_{q^2}(x w)) = 2 / (theta_q(x) theta_q(w/(alpha beta^2))"
            " + theta_q(w) theta_q(1/(beta q^(1/2)))), x = alpha beta / q^(1/2)", _C),
        IdentityInfo(
            _R.COROL1, "shifted reciprocal theta_{q^2} product as a difference of theta_q products",
            "1/(theta_{q^2}(x q/w) theta_{q^2}(x w q)) = 2 alpha beta / (-theta_q(x)"
            " theta_q(w/(alpha beta^2)) + theta_q(w) theta_q(1/(beta q^(1/2)))),"
            " x = alpha beta / q^(1/2)", _C),
        IdentityInfo(
            _R.CO6, "triple-product rearrangement equal to 1",
            "1 = 1/2 (q,q;q^2) / ((alpha q^(3/2)/(gamma w), alpha beta w q^(1/2);q^2)"
            " (gamma w q^(1/2)/alpha, q^(3/2)/(alpha beta w);q^2)) [ " + _BR1 + " + " + _BR2 + " ]",
            _C),
        IdentityInfo(
            _R.CO7, "triple-product rearrangement, sum of two q-products",
            "(alpha q^(3/2)/(gamma w), alpha beta w q^(1/2);q^2) = 1/2 (q,q;q^2)"
            " / (gamma w q^(1/2)/alpha, q^(3/2)/(alpha beta w);q^2) [ " + _BR1 + " + " + _BR2 + " ]",
            _C),
        IdentityInfo(
            _R.CORO1, "triple-product rearrangement equal to alpha beta",
            "alpha beta = 1/2 (q,q;q^2) / ((alpha q^(5/2)/(gamma w), alpha beta w q^(3/2);q^2)"
            " (gamma w/(alpha q^(1/2)), q^(1/2)/(alpha beta w);q^2)) [ " + _BR1 + " - " + _BR2 + " ]",
            _C),
        IdentityInfo(
            _R.CORO2, "triple-product rearrangement, difference of two q-products (as stated)",
            "alpha beta (alpha q^(5/2)/(gamma w), alpha beta w q^(3/2);q^2) = 1/2 (q,q;q^2)"
            " / (gamma w q^(1/2)/alpha, q^(3/2)/(alpha beta w);q^2) [ " + _BR1 + " - " + _BR2 + " ]",
            _C, holds=False,
            defect="false as stated: the denominator must be"
            " (gamma w/(alpha q^(1/2)), q^(1/2)/(alpha beta w);q^2), the one in CORO1"),
        IdentityInfo(
            _R.PHYS1, "sum formula at alpha = -a, beta = -a^(-1/2)",
            "1/2 (q;q^2)/(q^2;q^2) [ (a^(-1/2) q;q)/(a^(1/2);q) 1psi1(a^(1/2); a^(-1/2) q; q, u)"
            " + (-a^(-1/2) q;q)/(-a^(1/2);q) 1psi1(-a^(1/2); -a^(-1/2) q; q, u) ]"
            " = (q/a, a^(1/2) q^(1/2)/w, a^(1/2) q^(1/2) w;q^2)"
            " / (a, a^(-1/2) q^(1/2) w, a^(-1/2) q^(1/2)/w;q^2), u = q^(1/2) a^(-1/2) w",
            PhysicsParams),
        IdentityInfo(
            _R.PHYS2, "difference formula at alpha = -a, beta = -a^(-1/2)",
            "1/2 (q;q^2)/(q^2;q^2) [ first term - second term ]"
            " = a^(1/2) (q/a, a^(1/2) q^(3/2)/w, a^(1/2) q^(3/2) w;q^2)"
            " / (a, a^(-1/2) q^(3/2) w, a^(-1/2) q^(3/2)/w;q^2)", PhysicsParams),
        IdentityInfo(
            _R.RAMANUJAN, "Ramanujan's 1psi1 summation",
            "1psi1(a; b; q, z) = (q, b/a, a z, q/(a z);q)/(b, q/a, z, b/(a z);q), |b/a| < |z| < 1",
            PsiParams),
        IdentityInfo(
            _R.QBINOM, "q-binomial theorem",
            "sum_{n>=0} (a;q)_n/(q;q)_n z^n = (a z;q)/(z;q), |z| < 1", BinomialParams),
        IdentityInfo(
            _R.JTP, "Jacobi triple product",
            "theta_q(z) = (q, q^(1/2) z, q^(1/2)/z;q)", ThetaParams),
        IdentityInfo(
            _R.THETA_INV, "theta inversion", "theta_q(z) = theta_q(1/z)", ThetaParams),
        IdentityInfo(
            _R.THETA_QDIFF, "theta quasi-periodicity",
            "theta_q(z q^k) = (-z)^(-k) q^(-k^2/2) theta_q(z)", ThetaParams),
        IdentityInfo(
            _R.HORN, "bilateral binomial theorem",
            "1H1(a; c; z) = (1-z)^(c-a-1)/(-z)^(c-1) Gamma(1-a) Gamma(c)/Gamma(c-a),"
            " |z| = 1, z != 1, Re(c-a) > 1", HornParams, uses_base=False),
        IdentityInfo(
            _R.DOUGALL, "Dougall's 2H2 sum at z = 1",
            "2H2(a, b; c, d; 1) = Gamma(1-a) Gamma(1-b) Gamma(c) Gamma(d) Gamma(c+d-a-b-1)"
            " / (Gamma(c-a) Gamma(d-a) Gamma(c-b) Gamma(d-b)), Re(c+d-a-b) > 1",
            DougallParams, uses_base=False),
        IdentityInfo(
            _R.LIMIT_MAIN, "q -> 1 limit of the sum formula (as stated)",
            "2^(2b+1)/Gamma(b+1) 1H1(-b; b+1; w) = Gamma(1/2)/Gamma(b+1/2) (-w)^(-b) (1-w)^(2b)",
            LimitParams, uses_base=False, holds=False,
            defect="false as stated: Horn's closed form and the duplication formula give"
            " left side = 2 x right side for every b > 0 and w"),
    ]
}


def statement(identity) -> dict:
    """Title, statement text and status of a registered identity."""
    info = REGISTRY[as_identity(identity)]
    out = {"identity": info.tag.value, "title": info.title, "statement": info.statement,
           "holds_as_stated": info.holds}
    if info.defect:
        out["defect"] = info.defect
    return out


# ---------------------------------------------------------------------------
# evaluation helpers


def _ev(label: str, fn: Callable, *args, **kwargs):
    """Call ``fn`` and prefix any library error with the subexpression label."""
    try:
        return fn(*args, **kwargs)
    except (DomainError, PoleError, BudgetError, PrecisionError) as exc:
        raise type(exc)(f"{label}: {exc}") from exc


class _Constrained:
    """Materialised alpha, beta, gamma, w and the bases for one evaluation."""

    def __init__(self, params: ConstrainedParams, ctx: PrecisionContext):
        self.ctx = ctx
        self.base = params.base
        self.base2 = params.base.squared()
        self.p = params.base.p(ctx)
        self.q = params.base.q(ctx)
        self.beta = to_mpc(params.beta)
        self.w = to_mpc(params.w)
        if self.beta == 0 or self.w == 0:
            raise DomainError("beta and w must be nonzero")
        self.alpha = -1 / (self.beta * self.beta)
        self.gamma = self.q / self.beta
        self.ab = self.alpha * self.beta
        self.z = self.gamma * self.w / (self.alpha * self.p)

    def poch(self, args, label):
        return _ev(f"({label}; q)_inf", qpoch_multi, args, self.base, self.ctx)

    def poch2(self, args, label):
        return _ev(f"({label}; q^2)_inf", qpoch_multi, args, self.base2, self.ctx)

    def theta(self, x, label):
        return _ev(f"theta_q({label})", theta_series, x, self.base, self.ctx)

    def theta2(self, x, label):
        return _ev(f"theta_q^2({label})", theta_series, x, self.base2, self.ctx)

    def psi(self, a, b, label, **kw):
        return _ev(label, psi_bilateral, PsiSpec((a,), (b,)), self.base, self.z, self.ctx, **kw)


def constrained_blocks(c: _Constrained, **psi_kw) -> dict[str, Approx]:
    """The q-Pochhammer and 1psi1 pieces shared by the sum formulas."""
    al, be, ga = c.alpha, c.beta, c.gamma
    return {
        "A": c.poch([ga / al], "gamma/alpha"),
        "P": c.poch([c.ab], "alpha beta"),
        "B": c.poch([be * be * ga], "beta^2 gamma"),
        "M": c.poch([1 / be], "1/beta"),
        "psi1": c.psi(c.ab, ga / al, "1psi1(alpha beta; gamma/alpha; q, z)", **psi_kw),
        "psi2": c.psi(1 / be, be * be * ga, "1psi1(1/beta; beta^2 gamma; q, z)", **psi_kw),
    }


def _series_pair(c: _Constrained, sign: int) -> Approx:
    k = constrained_blocks(c)
    first = k["A"] / k["P"] * k["psi1"]
    second = k["B"] / k["M"] * k["psi2"]
    return (first + second if sign > 0 else first - second) * Approx.exact(mpfr(0.5))


def _q_ratio(c: _Constrained) -> Approx:
    return c.poch2([c.q], "q") / c.poch2([c.q * c.q], "q^2")


def main1_product(c: _Constrained) -> Approx:
    al, be, ga, w, p, q = c.alpha, c.beta, c.gamma, c.w, c.p, c.q
    lead = c.poch2([ga / (al * al * be)], "gamma/(alpha^2 beta)") / c.poch2(
        [al * al * be * be], "alpha^2 beta^2")
    num = c.poch2([al * p * q / (ga * w), c.ab * w * q / p], "alpha q^(3/2)/(gamma w), ...")
    den = c.poch2([ga * w / (al * p), p / (c.ab * w)], "gamma w/(alpha q^(1/2)), ...")
    return lead * num / den


def main2_product(c: _Constrained) -> Approx:
    al, be, ga, w, p, q = c.alpha, c.beta, c.gamma, c.w, c.p, c.q
    lead = c.poch2([ga / (al * al * be)], "gamma/(alpha^2 beta)") / c.poch2(
        [al * al * be * be], "alpha^2 beta^2")
    num = c.poch2([al * p * q * q / (ga * w), c.ab * w * q * q / p], "alpha q^(5/2)/(gamma w), ...")
    den = c.poch2([ga * w * p / al, q * p / (c.ab * w)], "gamma w q^(1/2)/alpha, ...")
    return Approx.exact(c.ab) * lead * num / den


def _lhs_main(sign):
    def f(params, ctx):
        c = _Constrained(params, ctx)
        return _q_ratio(c) * _series_pair(c, sign)
    return f


def _lhs_cor(sign):
    def f(params, ctx):
        return _series_pair(_Constrained(params, ctx), sign)
    return f


def _rhs_main1(params, ctx):
    return main1_product(_Constrained(params, ctx))


def _rhs_main2(params, ctx):
    return main2_product(_Constrained(params, ctx))


def _rhs_cor(product):
    def f(params, ctx):
        c = _Constrained(params, ctx)
        return product(c) / _q_ratio(c)
    return f


def _pair_values(params: PairParams, ctx):
    return to_mpc(params.xi), to_mpc(params.eta), params.base, params.base.squared()


def _lhs_lem1(params, ctx):
    xi, eta, base, base2 = _pair_values(params, ctx)
    x = xi * eta if params.case == 1 else xi / eta
    return _ev("theta_q^2", theta_series, x, base2, ctx)


def _rhs_lem1(params, ctx):
    xi, eta, base, base2 = _pair_values(params, ctx)
    x = xi * eta if params.case == 1 else xi / eta
    t = _ev("theta_q^2", theta_series, x, base2, ctx) + _ev("theta_q^2", theta_series, 1 / x, base2, ctx)
    return t * Approx.exact(mpfr(0.5))


def _lhs_p1(params, ctx):
    xi, eta, base, base2 = _pair_values(params, ctx)
    return theta_series(xi / eta, base2, ctx) * theta_series(xi * eta, base2, ctx)


def _rhs_p1(params, ctx):
    xi, eta, base, base2 = _pair_values(params, ctx)
    return theta_series(xi, base, ctx) * theta_series(-eta, base, ctx)


def p1_omitted_term(params: PairParams, ctx) -> Approx:
    """The term ``-xi q^(1/2) theta_{q^2}(q xi/eta) theta_{q^2}(q xi eta)`` that the
    two-base product needs added to it to equal ``theta_q(xi) theta_q(-eta)``."""
    with ctx.local():
        xi, eta, base, base2 = _pair_values(params, ctx)
        p, q = base.p(ctx), base.q(ctx)
        t = theta_series(q * xi / eta, base2, ctx) * theta_series(q * xi * eta, base2, ctx)
        return t * Approx.exact(-xi * p)


def _theta_pair_x(c: _Constrained, shifted: bool):
    return c.ab * c.p if shifted else c.ab / c.p


def _lhs_co3(shifted):
    def f(params, ctx):
        c = _Constrained(params, ctx)
        x, w = _theta_pair_x(c, shifted), c.w
        return Approx.exact(1) / (c.theta2(x / w, "x/w") * c.theta2(x * w, "x w"))
    return f


def _rhs_co3(shifted):
    def f(params, ctx):
        c = _Constrained(params, ctx)
        x, w = _theta_pair_x(c, shifted), c.w
        s1 = c.theta2(x / w, "x/w") + c.theta2(w / x, "w/x")
        s2 = c.theta2(x * w, "x w") + c.theta2(1 / (x * w), "1/(x w)")
        return Approx.exact(4) / (s1 * s2)
    return f


def _lhs_co4(shifted):
    def f(params, ctx):
        c = _Constrained(params, ctx)
        x, w = _theta_pair_x(c, shifted), c.w
        first = x / w if params.case in (1, 2) else w / x
        second = x * w if params.case in (1, 3) else 1 / (x * w)
        return c.theta2(first, "first") * c.theta2(second, "second")
    return f


def _rhs_co4(shifted):
    def f(params, ctx):
        c = _Constrained(params, ctx)
        x, w = _theta_pair_x(c, shifted), c.w
        if params.case in (1, 4):
            return c.theta(x, "x") * c.theta(-w, "-w")
        other = -x if shifted else -1 / x
        return c.theta(w, "w") * c.theta(other, "-x")
    return f


def _co5_pieces(c: _Constrained):
    t1 = c.theta(c.ab / c.p, "alpha beta/q^(1/2)") * c.theta(
        c.w / (c.alpha * c.beta * c.beta), "w/(alpha beta^2)")
    t2 = c.theta(c.w, "w") * c.theta(1 / (c.beta * c.p), "1/(beta q^(1/2))")
    return t1, t2


def _rhs_co5(params, ctx):
    c = _Constrained(params, ctx)
    t1, t2 = _co5_pieces(c)
    return Approx.exact(2) / (t1 + t2)


def _rhs_corol1(params, ctx):
    c = _Constrained(params, ctx)
    t1, t2 = _co5_pieces(c)
    return Approx.exact(2 * c.ab) / (t2 - t1)


def _brackets(c: _Constrained):
    be, ga, w, p, q = c.beta, c.gamma, c.w, c.p, c.q
    br1 = c.poch([be * ga * w / p, q * p / (be * ga * w), 1 / be, q * be], "first bracket")
    br2 = c.poch([ga * w / (c.ab * p), c.ab * q * p / (ga * w), c.ab, q / c.ab], "second bracket")
    return br1, br2


def _half_qq(c: _Constrained) -> Approx:
    return c.poch2([c.q, c.q], "q, q") * Approx.exact(mpfr(0.5))


def _shifted_pairs(c: _Constrained):
    al, ga, w, p, q = c.alpha, c.gamma, c.w, c.p, c.q
    up1 = c.poch2([al * p * q / (ga * w), c.ab * w * q / p], "alpha q^(3/2)/(gamma w), ...")
    up2 = c.poch2([al * p * q * q / (ga * w), c.ab * w * q * q / p], "alpha q^(5/2)/(gamma w), ...")
    low0 = c.poch2([ga * w / (al * p), p / (c.ab * w)], "gamma w/(alpha q^(1/2)), ...")
    low1 = c.poch2([ga * w * q / (al * p), p * q / (c.ab * w)], "gamma w q^(1/2)/alpha, ...")
    return up1, up2, low0, low1


def _co6_lhs(params, ctx):
    return Approx.exact(1)


def _co6_rhs(params, ctx):
    c = _Constrained(params, ctx)
    br1, br2 = _brackets(c)
    up1, up2, low0, low1 = _shifted_pairs(c)
    return _half_qq(c) / (up1 * low1) * (br1 + br2)


def _co7_lhs(params, ctx):
    c = _Constrained(params, ctx)
    return _shifted_pairs(c)[0]


def _co7_rhs(params, ctx):
    c = _Constrained(params, ctx)
    br1, br2 = _brackets(c)
    up1, up2, low0, low1 = _shifted_pairs(c)
    return _half_qq(c) / low1 * (br1 + br2)


def _coro1_lhs(params, ctx):
    with ctx.local():
        c = _Constrained(params, ctx)
        return Approx.exact(c.ab)


def _coro1_rhs(params, ctx):
    c = _Constrained(params, ctx)
    br1, br2 = _brackets(c)
    up1, up2, low0, low1 = _shifted_pairs(c)
    return _half_qq(c) / (up2 * low0) * (br1 - br2)


def _coro2_lhs(params, ctx):
    c = _Constrained(params, ctx)
    return Approx.exact(c.ab) * _shifted_pairs(c)[1]


def _coro2_rhs(params, ctx):
    c = _Constrained(params, ctx)
    br1, br2 = _brackets(c)
    up1, up2, low0, low1 = _shifted_pairs(c)
    return _half_qq(c) / low1 * (br1 - br2)


def coro2_repaired_rhs(params: ConstrainedParams, ctx) -> Approx:
    """CORO2's right side with the denominator taken from CORO1."""
    c = _Constrained(params, ctx)
    br1, br2 = _brackets(c)
    up1, up2, low0, low1 = _shifted_pairs(c)
    return _half_qq(c) / low0 * (br1 - br2)


class _Physics:
    def __init__(self, params: PhysicsParams, ctx: PrecisionContext):
        self.ctx = ctx
        self.base = params.base
        self.base2 = params.base.squared()
        self.p = params.base.p(ctx)
        self.q = params.base.q(ctx)
        self.a = to_mpc(params.a)
        self.w = to_mpc(params.w)
        if self.a == 0 or self.w == 0:
            raise DomainError("a and w must be nonzero")
        self.s = cpow_principal(self.a, mpfr(0.5), ctx)
        self.u = self.p * self.w / self.s


def physics_as_constrained(params: PhysicsParams, ctx: PrecisionContext) -> ConstrainedParams:
    """The sum-formula parameters ``beta = -a^(-1/2)`` (principal root), same ``w`` and base."""
    with ctx.local():
        s = cpow_principal(to_mpc(params.a), mpfr(0.5), ctx)
        return ConstrainedParams(-1 / s, to_mpc(params.w), params.base)


def _lhs_phys(sign):
    def f(params, ctx):
        h = _Physics(params, ctx)
        s, q = h.s, h.q
        ratio = _ev("(q;q^2)/(q^2;q^2)", lambda: qpoch_inf(q, h.base2, ctx) / qpoch_inf(q * q, h.base2, ctx))
        t1 = _ev("(a^(-1/2) q;q)/(a^(1/2);q)",
                 lambda: qpoch_inf(q / s, h.base, ctx) / qpoch_inf(s, h.base, ctx))
        t2 = _ev("(-a^(-1/2) q;q)/(-a^(1/2);q)",
                 lambda: qpoch_inf(-q / s, h.base, ctx) / qpoch_inf(-s, h.base, ctx))
        psi1 = _ev("1psi1(a^(1/2); a^(-1/2) q; q, u)", psi_bilateral,
                   PsiSpec((s,), (q / s,)), h.base, h.u, ctx)
        psi2 = _ev("1psi1(-a^(1/2); -a^(-1/2) q; q, u)", psi_bilateral,
                   PsiSpec((-s,), (-q / s,)), h.base, h.u, ctx)
        first, second = t1 * psi1, t2 * psi2
        inner = first + second if sign > 0 else first - second
        return ratio * inner * Approx.exact(mpfr(0.5))
    return f


def _rhs_phys(power):
    def f(params, ctx):
        h = _Physics(params, ctx)
        s, a, w, q = h.s, h.a, h.w, h.q
        pk = h.p**power
        num = _ev("(q/a, ...; q^2)", qpoch_multi, [q / a, s * pk / w, s * pk * w], h.base2, ctx)
        den = _ev("(a, ...; q^2)", qpoch_multi, [a, pk * w / s, pk / (s * w)], h.base2, ctx)
        value = num / den
        return value * Approx.exact(s) if power == 3 else value
    return f


def _lhs_ramanujan(params, ctx):
    return _ev("1psi1(a; b; q, z)", psi_bilateral, PsiSpec((params.a,), (params.b,)),
               params.base, params.z, ctx)


def _rhs_ramanujan(params, ctx):
    return _ev("Ramanujan product", ramanujan_rhs, params.a, params.b, params.base, params.z, ctx)


def _lhs_qbinom(params, ctx):
    with ctx.local():
        q = params.base.q(ctx)
        return _ev("2phi1 sum", psi_bilateral, PsiSpec((params.a,), (q,)), params.base, params.z, ctx)


def _rhs_qbinom(params, ctx):
    with ctx.local():
        a, z = to_mpc(params.a), to_mpc(params.z)
        return qpoch_inf(a * z, params.base, ctx) / qpoch_inf(z, params.base, ctx)


def _lhs_jtp(params, ctx):
    return _ev("theta series", theta_series, params.z, params.base, ctx)


def _rhs_jtp(params, ctx):
    return _ev("triple product", theta_product, params.z, params.base, ctx)


def _rhs_inv(params, ctx):
    with ctx.local():
        return _ev("theta series", theta_series, 1 / to_mpc(params.z), params.base, ctx)


def _lhs_qdiff(params, ctx):
    with ctx.local():
        z = to_mpc(params.z) * params.base.q(ctx) ** params.k
        return _ev("theta series", theta_series, z, params.base, ctx)


def _rhs_qdiff(params, ctx):
    return _ev("shifted theta", theta_shift, params.z, params.k, params.base, ctx)


def closed_form_approx(value: mpc, ctx: PrecisionContext) -> Approx:
    """A closed-form value with an allowance for the rounding in its gamma factors."""
    # closed forms go through a handful of gamma evaluations, each accurate to a few ulps
    with ctx.local():
        return Approx(value, 64 * ctx.unit_roundoff * abs(value), 1)


def _lhs_horn(params, ctx):
    return _ev("1H1", eval_1H1, params.a, params.c, params.z, ctx)


def _rhs_horn(params, ctx):
    return closed_form_approx(_ev("closed form", horn_closed_form, params.a, params.c, params.z, ctx), ctx)


def _lhs_dougall(params, ctx):
    return _ev("2H2", eval_2H2, params.a, params.b, params.c, params.d, 1, ctx)


def _rhs_dougall(params, ctx):
    return closed_form_approx(_ev("closed form", dougall_closed_form, params.a, params.b, params.c,
                       params.d, ctx), ctx)


def _lhs_limit(params, ctx):
    from .limits import mainlim2_lhs_via_H

    return mainlim2_lhs_via_H(params, ctx)


def _rhs_limit(params, ctx):
    from .limits import mainlim2_rhs

    return closed_form_approx(mainlim2_rhs(params, ctx), ctx)


_SIDES: dict[IdentityId, tuple[Callable, Callable]] = {
    _R.MAIN1: (_lhs_main(+1), _rhs_main1),
    _R.MAIN2: (_lhs_main(-1), _rhs_main2),
    _R.COR1: (_lhs_cor(+1), _rhs_cor(main1_product)),
    _R.COR2: (_lhs_cor(-1), _rhs_cor(main2_product)),
    _R.LEM1: (_lhs_lem1, _rhs_lem1),
    _R.CO3: (_lhs_co3(False), _rhs_co3(False)),
    _R.CORL3: (_lhs_co3(True), _rhs_co3(True)),
    _R.P1: (_lhs_p1, _rhs_p1),
    _R.CO4: (_lhs_co4(False), _rhs_co4(False)),
    _R.CORL4: (_lhs_co4(True), _rhs_co4(True)),
    _R.CO5: (_lhs_co3(False), _rhs_co5),
    _R.COROL1: (_lhs_co3(True), _rhs_corol1),
    _R.CO6: (_co6_lhs, _co6_rhs),
    _R.CO7: (_co7_lhs, _co7_rhs),
    _R.CORO1: (_coro1_lhs, _coro1_rhs),
    _R.CORO2: (_coro2_lhs, _coro2_rhs),
    _R.PHYS1: (_lhs_phys(+1), _rhs_phys(1)),
    _R.PHYS2: (_lhs_phys(-1), _rhs_phys(3)),
    _R.RAMANUJAN: (_lhs_ramanujan, _rhs_ramanujan),
    _R.QBINOM: (_lhs_qbinom, _rhs_qbinom),
    _R.JTP: (_lhs_jtp, _rhs_jtp),
    _R.THETA_INV: (_lhs_jtp, _rhs_inv),
    _R.THETA_QDIFF: (_lhs_qdiff, _rhs_qdiff),
    _R.HORN: (_lhs_horn, _rhs_horn),
    _R.DOUGALL: (_lhs_dougall, _rhs_dougall),
    _R.LIMIT_MAIN: (_lhs_limit, _rhs_limit),
}


def _check_params(identity: IdentityId, params) -> None:
    info = REGISTRY[identity]
    if not isinstance(params, info.params):
        raise TypeError(f"{identity} expects {info.params.__name__}, got {type(params).__name__}")
    case = getattr(params, "case", 1)
    if not 1 <= case <= info.cases:
        raise DomainError(f"{identity} has cases 1..{info.cases}, got {case}")


def eval_side(identity, side: str, params, ctx: PrecisionContext) -> Approx:
    """Evaluate the ``"lhs"`` or ``"rhs"`` of a registered identity."""
    identity = as_identity(identity)
    if side not in ("lhs", "rhs"):
        raise ValueError("side must be 'lhs' or 'rhs'")
    _check_params(identity, params)
    fn = _SIDES[identity][0 if side == "lhs" else 1]
    with ctx.local():
        return fn(params, ctx)


# ---------------------------------------------------------------------------
# domains


def _abs(x) -> float:
    if isinstance(x, RationalComplex):
        return math.sqrt(x.abs2())
    return float(abs(x))


def _re(x) -> float:
    return float(x.re) if isinstance(x, RationalComplex) else float(to_mpc(x).real)


def _im(x) -> float:
    return float(x.im) if isinstance(x, RationalComplex) else float(to_mpc(x).imag)


def _exact_abs2(x):
    return x.abs2() if isinstance(x, RationalComplex) else None


def _on_unit_circle(x) -> bool:
    a2 = _exact_abs2(x)
    if a2 is not None:
        return a2 == 1
    return abs(_abs(x) - 1) < 1e-30


def _is_one(x) -> bool:
    if isinstance(x, RationalComplex):
        return x.re == 1 and x.im == 0
    return abs(_re(x) - 1) < 1e-30 and abs(_im(x)) < 1e-30


def domain_check(identity, params) -> tuple[bool, str]:
    """Whether ``params`` lie in the stated domain; never raises on bad values."""
    identity = as_identity(identity)
    try:
        _check_params(identity, params)
    except (TypeError, DomainError) as exc:
        return False, str(exc)
    kind = REGISTRY[identity].params
    if kind is ConstrainedParams:
        b, w = _abs(params.beta), _abs(params.w)
        if b == 0 or w == 0:
            return False, "beta and w must be nonzero"
        if identity in (_R.MAIN1, _R.MAIN2, _R.COR1, _R.COR2):
            pb = math.sqrt(params.base.q_value_exact()) * b
            if not pb < w < 1 / pb:
                return False, "needs |q^(1/2) beta| < |w| < 1/|q^(1/2) beta|"
        return True, ""
    if kind is PhysicsParams:
        a, w = _abs(params.a), _abs(params.w)
        if a == 0 or w == 0:
            return False, "a and w must be nonzero"
        q = float(params.base.q_value_exact())
        u = math.sqrt(q) * w / math.sqrt(a)
        if not q / a < u < 1:
            return False, "needs |q/a| < |q^(1/2) w / a^(1/2)| < 1"
        return True, ""
    if kind is PairParams:
        if _abs(params.xi) == 0 or _abs(params.eta) == 0:
            return False, "xi and eta must be nonzero"
        return True, ""
    if kind is ThetaParams:
        return (True, "") if _abs(params.z) > 0 else (False, "z must be nonzero")
    if kind is PsiParams:
        a, b, z = _abs(params.a), _abs(params.b), _abs(params.z)
        if a == 0 or z == 0:
            return False, "a and z must be nonzero"
        if not b / a < z < 1:
            return False, "needs |b/a| < |z| < 1"
        return True, ""
    if kind is BinomialParams:
        z = _abs(params.z)
        return (True, "") if 0 < z < 1 else (False, "needs 0 < |z| < 1")
    if kind is HornParams:
        if not _on_unit_circle(params.z) or _is_one(params.z):
            return False, "needs |z| = 1 and z != 1"
        if not _re(params.c) - _re(params.a) > 1:
            return False, "needs Re(c - a) > 1"
        return True, ""
    if kind is DougallParams:
        if not _re(params.c) + _re(params.d) - _re(params.a) - _re(params.b) > 1:
            return False, "needs Re(c + d - a - b) > 1"
        return True, ""
    if kind is LimitParams:
        if _im(params.b) != 0 or not _re(params.b) > 0:
            return False, "needs real b > 0"
        if not _on_unit_circle(params.w) or _is_one(params.w):
            return False, "needs |w| = 1 and w != 1"
        return True, ""
    return True, ""


# ---------------------------------------------------------------------------
# checks and reports


@dataclass
class IdentityReport:
    identity: IdentityId
    params: dict
    lhs: mpc | None
    rhs: mpc | None
    abs_err: mpfr | None
    rel_err: mpfr | None
    lhs_bound: mpfr | None
    rhs_bound: mpfr | None
    tolerance: mpfr | None
    passed: bool | None
    status: str
    bits: int
    truncation: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_record(self, digits: int | None = None) -> dict:
        d = digits or 30
        num = (lambda x: None if x is None else format_mpfr(x, 6))
        val = (lambda z: None if z is None else format_mpc(z, d))
        return {
            "identity": self.identity.value,
            "statement": REGISTRY[self.identity].title,
            "params": self.params,
            "lhs": val(self.lhs),
            "rhs": val(self.rhs),
            "abs_err": num(self.abs_err),
            "rel_err": num(self.rel_err),
            "bounds": {"lhs": num(self.lhs_bound), "rhs": num(self.rhs_bound),
                       "tolerance": num(self.tolerance)},
            "pass": self.passed,
            "status": self.status,
            "precision_bits": self.bits,
            "truncation": self.truncation,
            "notes": list(self.notes),
        }


def tolerance_for(lhs: Approx, rhs: Approx, ctx: PrecisionContext) -> mpfr:
    """Fixed policy: ``4 (lhs_err + rhs_err) + 2^-(bits-guard) max(|lhs|, |rhs|)``."""
    with ctx.local():
        return 4 * (lhs.err + rhs.err) + ctx.tol * max(abs(lhs.value), abs(rhs.value))


def _defect_notes(identity: IdentityId, params, ctx, residual: mpc) -> list[str]:
    notes = []
    info = REGISTRY[identity]
    if info.defect:
        notes.append(info.defect)
    try:
        if identity is _R.P1:
            omitted = p1_omitted_term(params, ctx)
            gap = abs(residual + omitted.value)
            notes.append(f"lhs - rhs plus the omitted odd-parity term: {format_mpfr(gap, 3)}")
        elif identity is _R.CORO2:
            fixed = coro2_repaired_rhs(params, ctx)
            lhs = eval_side(identity, "lhs", params, ctx)
            notes.append("lhs minus the repaired right side: "
                         f"{format_mpfr(abs(lhs.value - fixed.value), 3)}")
        elif identity is _R.LIMIT_MAIN:
            lhs = eval_side(identity, "lhs", params, ctx).value
            rhs = eval_side(identity, "rhs", params, ctx).value
            ratio = lhs / rhs
            notes.append(f"lhs / rhs = {format_mpfr(ratio.real, 12)}"
                         f"{'+' if ratio.imag >= 0 else '-'}{format_mpfr(abs(ratio.imag), 3)}i")
    except QBilatError as exc:
        notes.append(f"diagnostic unavailable: {exc}")
    return notes


def check(identity, params, ctx: PrecisionContext) -> IdentityReport:
    """Evaluate both sides and apply the tolerance policy.

    A vanishing denominator on either side gives an ``indeterminate`` report.
    """
    identity = as_identity(identity)
    ok, reason = domain_check(identity, params)
    if not ok:
        raise DomainError(f"{identity}: {reason}")
    record = params.to_record()
    try:
        lhs = eval_side(identity, "lhs", params, ctx)
        rhs = eval_side(identity, "rhs", params, ctx)
    except PoleError as exc:
        return IdentityReport(identity, record, None, None, None, None, None, None, None,
                              None, "indeterminate", ctx.bits, {}, [str(exc)])
    with ctx.local():
        residual = lhs.value - rhs.value
        abs_err = abs(residual)
        scale = max(abs(lhs.value), abs(rhs.value))
        rel_err = abs_err / scale if scale > 0 else abs_err
        tol = tolerance_for(lhs, rhs, ctx)
        passed = bool(abs_err <= tol)
        notes = [] if passed else _defect_notes(identity, params, ctx, residual)
        if passed and not REGISTRY[identity].holds:
            notes.append("passes at this point although the statement fails in general")
        return IdentityReport(
            identity, record, lhs.value, rhs.value, abs_err, rel_err, lhs.err, rhs.err, tol,
            passed, "pass" if passed else "fail", ctx.bits,
            {"lhs_terms": lhs.terms, "rhs_terms": rhs.terms}, notes,
        )


# ---------------------------------------------------------------------------
# seeded scans


@dataclass(frozen=True)
class SamplerConfig:
    """Seeded sampling of parameter points.

    ``beta`` moduli lie in ``[beta_min, beta_max]`` with arguments kept at
    least ``arg_gap`` away from 0 and pi.  Points whose series would converge
    slower than geometric ratio ``ratio_cap`` are resampled.
    """

    samples: int = 20
    seed: int = 0
    q_grid: tuple = (Fraction(3, 10), Fraction(1, 2), Fraction(7, 10))
    beta_min: float = 0.2
    beta_max: float = 1.5
    arg_gap: float = 0.1
    ratio_cap: float = 0.9
    workers: int = 1


def _round6(x: float) -> Fraction:
    return Fraction(round(x * 10**6), 10**6)


def _polar(r: float, t: float) -> RationalComplex:
    return RationalComplex(_round6(r * math.cos(t)), _round6(r * math.sin(t)))


def _off_axis_arg(rng: random.Random, gap: float) -> float:
    t = rng.uniform(gap, math.pi - gap)
    return t if rng.random() < 0.5 else -t


def _log_uniform(rng: random.Random, lo: float, hi: float) -> float:
    return math.exp(rng.uniform(math.log(lo), math.log(hi)))


def _unit_rational(rng: random.Random) -> RationalComplex:
    # rational points of the unit circle, kept away from 1
    t = _round6(rng.uniform(0.3, 3.0)) * (1 if rng.random() < 0.5 else -1)
    d = 1 + t * t
    return RationalComplex((1 - t * t) / d, 2 * t / d)


def _sample(identity: IdentityId, rng: random.Random, cfg: SamplerConfig, q_max: float) -> dict:
    kind = REGISTRY[identity].params
    cap = cfg.ratio_cap
    p_max = math.sqrt(q_max)
    if kind is ConstrainedParams:
        while True:
            rb = rng.uniform(cfg.beta_min, cfg.beta_max)
            if p_max * rb < cap * cap:
                break
        beta = _polar(rb, _off_axis_arg(rng, cfg.arg_gap))
        pb = p_max * math.sqrt(beta.abs2())
        w = _polar(_log_uniform(rng, pb / cap, cap / pb), rng.uniform(-math.pi, math.pi))
        return {"beta": beta, "w": w}
    if kind is PhysicsParams:
        while True:
            ra = rng.uniform(0.4, 2.5)
            if q_max / ra < cap * cap:
                break
        a = _polar(ra, _off_axis_arg(rng, cfg.arg_gap))
        ra = math.sqrt(a.abs2())
        u = _log_uniform(rng, q_max / ra / cap, cap)
        w = _polar(u * math.sqrt(ra) / p_max, rng.uniform(-math.pi, math.pi))
        return {"a": a, "w": w}
    if kind is PairParams:
        return {"xi": _polar(_log_uniform(rng, 0.3, 3.0), rng.uniform(-math.pi, math.pi)),
                "eta": _polar(_log_uniform(rng, 0.3, 3.0), rng.uniform(-math.pi, math.pi))}
    if kind is ThetaParams:
        k = rng.choice([-3, -2, -1, 1, 2, 3])
        return {"z": _polar(_log_uniform(rng, 0.2, 5.0), rng.uniform(-math.pi, math.pi)), "k": k}
    if kind is PsiParams:
        a = _polar(_log_uniform(rng, 0.5, 2.0), rng.uniform(-math.pi, math.pi))
        b = _polar(_log_uniform(rng, 0.05, 0.5), rng.uniform(-math.pi, math.pi))
        ratio = math.sqrt(b.abs2() / a.abs2())
        z = _polar(_log_uniform(rng, ratio / cap, cap), rng.uniform(-math.pi, math.pi))
        return {"a": a, "b": b, "z": z}
    if kind is BinomialParams:
        return {"a": _polar(_log_uniform(rng, 0.2, 3.0), rng.uniform(-math.pi, math.pi)),
                "z": _polar(_log_uniform(rng, 0.05, cap), rng.uniform(-math.pi, math.pi))}
    if kind is HornParams:
        a = _round6(rng.uniform(-2.0, 0.9))
        c = RationalComplex(a + _round6(rng.uniform(3.5, 6.0)), _round6(rng.uniform(-1.0, 1.0)))
        return {"a": RationalComplex(a), "c": c, "z": _unit_rational(rng)}
    if kind is DougallParams:
        return {"a": RationalComplex(_round6(rng.uniform(-0.5, 0.5))),
                "b": RationalComplex(_round6(rng.uniform(-0.5, 0.5))),
                "c": RationalComplex(_round6(rng.uniform(3.0, 4.5))),
                "d": RationalComplex(_round6(rng.uniform(3.0, 4.5)))}
    if kind is LimitParams:
        while True:
            b = _round6(rng.uniform(1.2, 2.8))
            if b.denominator != 1:
                break
        return {"b": RationalComplex(b), "w": _unit_rational(rng)}
    raise AssertionError(kind)


def sample_params(identity, cfg: SamplerConfig) -> list:
    """All parameter records a scan visits, in a fixed order."""
    identity = as_identity(identity)
    info = REGISTRY[identity]
    rng = random.Random(f"{cfg.seed}:{identity.value}")
    bases = [QBase.from_q(q) for q in cfg.q_grid] if info.uses_base else [None]
    q_max = max(float(Fraction(q)) for q in cfg.q_grid)
    out = []
    for _ in range(cfg.samples):
        for _attempt in range(1000):
            values = _sample(identity, rng, cfg, q_max)
            trial_base = QBase.from_q(max(Fraction(q) for q in cfg.q_grid)) if info.uses_base else None
            trial = info.params(**values, **({"base": trial_base} if info.uses_base else {}))
            if domain_check(identity, trial)[0]:
                break
        else:
            raise DomainError(f"{identity}: could not sample a point inside the domain")
        for base in bases:
            for case in range(1, info.cases + 1):
                kw = dict(values)
                if base is not None:
                    kw["base"] = base
                if info.cases > 1:
                    kw["case"] = case
                out.append(info.params(**kw))
    return out


def scan(identity, config: SamplerConfig, ctx: PrecisionContext) -> list[IdentityReport]:
    """Check an identity over seeded samples; the order of reports is fixed."""
    points = sample_params(identity, config)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(lambda pt: check(identity, pt, ctx), points))
    return [check(identity, pt, ctx) for pt in points]
