"""The q -> 1 limit of the sum formulas along q_k = 1 - 2^-k.

With ``beta = -q^b`` the weighted sides ``(1 - q^2)^(2b+1) x side`` both
contain the factor ``1/Gamma_{q^2}(-b)``, which has poles at integer ``b``.
Rows are therefore reported for the sides multiplied by
``(1 - q^2)^b (alpha^2 beta^2; q^2)_inf / (q^2; q^2)_inf``, which equals
``W(q) / Gamma_{q^2}(-b)`` and is regular for every ``b > 0``.  After the
cancellation the left side needs no division by ``(alpha beta; q)_inf``.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .catalog import (
    ConstrainedParams,
    IdentityId,
    LimitParams,
    _Constrained,
    as_identity,
    constrained_blocks,
    eval_side,
)
from .errors import BudgetError, DomainError, InsufficientDataError
from .numeric import (
    Approx,
    PrecisionContext,
    cpow_principal,
    eval_1H1,
    gamma,
    horn_closed_form,
)
from .qseries import QBase
from .values import RationalComplex, format_mpc, format_mpfr, to_mpc, to_mpfr

__all__ = [
    "LimitParams",
    "LimitRow",
    "LimitTable",
    "signed_params",
    "weighted_side",
    "normalized_side",
    "q_sequence",
    "richardson_extrapolate",
    "mainlim2_rhs",
    "mainlim2_lhs_via_H",
    "horn_anchor",
    "limit_report",
]

LIMIT_MAX_TERMS = 4 * 10**6
CSV_COLUMNS = ["k", "q", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "ratio_re", "ratio_im",
               "lhs_err", "rhs_err"]


def _b_value(lp: LimitParams) -> mpfr:
    b = to_mpc(lp.b)
    if b.imag != 0 or not b.real > 0:
        raise DomainError("the limit study needs a real exponent b > 0")
    return b.real


def signed_params(b, w, base: QBase, ctx: PrecisionContext | None = None) -> ConstrainedParams:
    """Constrained parameters with ``beta = -q^b`` (so ``alpha = -q^(-2b)``).

    Integer ``b`` keeps ``beta`` exact.
    """
    ctx = ctx or PrecisionContext()
    if isinstance(b, str):
        b = RationalComplex.parse(b)
    elif isinstance(b, (int, Fraction)):
        b = RationalComplex(b)
    if isinstance(b, RationalComplex) and b.im == 0 and b.re.denominator == 1:
        return ConstrainedParams(RationalComplex(-(base.q_value_exact() ** int(b.re))), w, base)
    with ctx.local():
        beta = -cpow_principal(base.q(ctx), b, ctx)
    return ConstrainedParams(beta, w, base)


def _weight_power(base: QBase, exponent, ctx: PrecisionContext) -> mpfr:
    with ctx.local():
        q = base.q(ctx)
        return cpow_principal(1 - q * q, exponent, ctx).real


def weighted_side(side: str, identity, lp: LimitParams, base: QBase,
                  ctx: PrecisionContext) -> Approx:
    """``(1 - q^2)^(2b+1)`` times a side of COR1 or COR2 at ``beta = -q^b``.

    Raises :class:`PoleError` for integer ``b``, where ``(alpha beta; q)_inf``
    vanishes; :func:`normalized_side` has no such restriction.
    """
    identity = as_identity(identity)
    if identity not in (IdentityId.COR1, IdentityId.COR2):
        raise DomainError("weighted sides are defined for COR1 and COR2")
    with ctx.local():
        b = _b_value(lp)
        params = signed_params(lp.b, lp.w, base, ctx)
        value = eval_side(identity, side, params, ctx)
        return value * Approx.exact(_weight_power(base, 2 * b + 1, ctx))


def normalized_side(side: str, identity, lp: LimitParams, base: QBase, ctx: PrecisionContext,
                    max_terms: int = LIMIT_MAX_TERMS) -> Approx:
    """A side of COR1 or COR2 at ``beta = -q^b`` times
    ``(1 - q^2)^b (alpha^2 beta^2; q^2)_inf / (q^2; q^2)_inf``.

    Uses ``(alpha^2 beta^2; q^2) = (alpha beta; q)(1/beta; q)`` to cancel the
    denominators of the series side.
    """
    identity = as_identity(identity)
    if identity not in (IdentityId.COR1, IdentityId.COR2):
        raise DomainError("normalised sides are defined for COR1 and COR2")
    if side not in ("lhs", "rhs"):
        raise ValueError("side must be 'lhs' or 'rhs'")
    with ctx.local():
        b = _b_value(lp)
        params = signed_params(lp.b, lp.w, base, ctx)
        c = _Constrained(params, ctx)
        weight = Approx.exact(_weight_power(base, b, ctx))
        if side == "lhs":
            k = constrained_blocks(c, allow_boundary=True, max_terms=max_terms)
            first = k["A"] * k["M"] * k["psi1"]
            second = k["B"] * k["P"] * k["psi2"]
            inner = first + second if identity is IdentityId.COR1 else first - second
            q2q2 = c.poch2([c.q * c.q], "q^2")
            return weight * inner * Approx.exact(mpfr(0.5)) / q2q2
        al, be, ga, w, p, q = c.alpha, c.beta, c.gamma, c.w, c.p, c.q
        lead = c.poch2([ga / (al * al * be)], "gamma/(alpha^2 beta)") / c.poch2([q], "q")
        if identity is IdentityId.COR1:
            num = c.poch2([al * p * q / (ga * w), c.ab * w * q / p], "numerator pair")
            den = c.poch2([ga * w / (al * p), p / (c.ab * w)], "denominator pair")
            return weight * lead * num / den
        num = c.poch2([al * p * q * q / (ga * w), c.ab * w * q * q / p], "numerator pair")
        den = c.poch2([ga * w * p / al, q * p / (c.ab * w)], "denominator pair")
        return Approx.exact(c.ab) * weight * lead * num / den


def q_sequence(k_min: int, k_max: int) -> list[tuple[int, QBase]]:
    """``q_k = 1 - 2^-k`` for ``k_min <= k <= k_max``, exactly."""
    if not 1 <= k_min <= k_max:
        raise ValueError("need 1 <= k_min <= k_max")
    return [(k, QBase.from_q(1 - Fraction(1, 2**k))) for k in range(k_min, k_max + 1)]


def richardson_extrapolate(points, order: int, ctx: PrecisionContext | None = None) -> Approx:
    """Polynomial extrapolation to ``eps = 0`` through the last ``order + 1`` points.

    ``points`` is a sequence of ``(eps, value)`` pairs with ``eps`` decreasing.
    The error estimate is the change from degree ``order - 1`` to ``order``.
    """
    ctx = ctx or PrecisionContext()
    if order < 0:
        raise ValueError("order must be non-negative")
    if len(points) < order + 1:
        raise InsufficientDataError(f"order {order} needs {order + 1} points, got {len(points)}")
    with ctx.local():
        pts = [(to_mpfr(e), to_mpc(v.value if isinstance(v, Approx) else v)) for e, v in points]

        def neville(sel):
            xs = [e for e, _ in sel]
            table = [v for _, v in sel]
            n = len(sel)
            for m in range(1, n):
                for i in range(n - m):
                    table[i] = (xs[i] * table[i + 1] - xs[i + m] * table[i]) / (xs[i] - xs[i + m])
            return table[0]

        best = neville(pts[-(order + 1):])
        if order == 0:
            err = abs(pts[-1][1] - pts[-2][1]) if len(pts) > 1 else mpfr(0)
        else:
            err = abs(best - neville(pts[-order:]))
        return Approx(best, err, order + 1)


def mainlim2_rhs(lp: LimitParams, ctx: PrecisionContext) -> mpc:
    """``Gamma(1/2)/Gamma(b + 1/2) (-w)^(-b) (1 - w)^(2b)``."""
    with ctx.local():
        b = to_mpc(_b_value(lp))
        w = to_mpc(lp.w)
        half = mpfr(0.5)
        g = gamma(half, ctx) / gamma(b + half, ctx)
        return g * cpow_principal(-w, -b, ctx) * cpow_principal(1 - w, 2 * b, ctx)


def mainlim2_lhs_via_H(lp: LimitParams, ctx: PrecisionContext, max_terms: int = 10**6,
                       tol=1e-12) -> Approx:
    """``2^(2b+1)/Gamma(b+1) 1H1(-b; b+1; w)`` from the series."""
    with ctx.local():
        b = to_mpc(_b_value(lp))
        series = eval_1H1(-b, b + 1, lp.w, ctx, max_terms=max_terms, tol=tol)
        factor = cpow_principal(2, 2 * b + 1, ctx) / gamma(b + 1, ctx)
        return series * Approx.exact(factor)


def horn_anchor(lp: LimitParams, ctx: PrecisionContext) -> mpc:
    """``2^(2b+1)/Gamma(b+1) 1H1(-b; b+1; w)`` from Horn's closed form."""
    with ctx.local():
        b = to_mpc(_b_value(lp))
        factor = cpow_principal(2, 2 * b + 1, ctx) / gamma(b + 1, ctx)
        return factor * horn_closed_form(-b, b + 1, lp.w, ctx)


@dataclass
class LimitRow:
    k: int
    q: Fraction
    lhs: Approx
    rhs: Approx

    @property
    def ratio(self) -> mpc:
        with gmpy2.context(precision=max(self.lhs.value.precision)):
            return self.lhs.value / self.rhs.value


@dataclass
class LimitTable:
    """Rows along ``q_k`` plus extrapolated values and closed-form anchors.

    ``constant`` is ``extrapolated_lhs / closed_form``; ``stated_ratio`` is
    the ratio of the two sides of the stated limit formula, from Horn's sum.
    """

    params: LimitParams
    identity: IdentityId
    order: int
    bits: int
    rows: list[LimitRow]
    extrapolated_lhs: Approx | None
    extrapolated_rhs: Approx | None
    closed_form: mpc
    horn_value: mpc
    lhs_via_H: Approx
    notes: list[str] = field(default_factory=list)
    exhausted: str | None = None

    @property
    def constant(self) -> mpc | None:
        if self.extrapolated_lhs is None:
            return None
        with gmpy2.context(precision=self.bits):
            return self.extrapolated_lhs.value / self.closed_form

    @property
    def max_ratio_deviation(self) -> mpfr:
        """``max_k |lhs_k / rhs_k - 1|`` over the rows."""
        with gmpy2.context(precision=self.bits):
            return max((abs(r.ratio - 1) for r in self.rows), default=mpfr(0))

    def ratio_within_bounds(self, ctx: PrecisionContext) -> bool:
        """Each row's sides agree within the tolerance policy of :func:`check`."""
        from .catalog import tolerance_for

        with ctx.local():
            return all(abs(r.lhs.value - r.rhs.value) <= tolerance_for(r.lhs, r.rhs, ctx)
                       for r in self.rows)

    @property
    def stated_ratio(self) -> mpc:
        with gmpy2.context(precision=self.bits):
            return self.horn_value / self.closed_form

    def to_record(self, digits: int = 30) -> dict:
        def z(v):
            return None if v is None else format_mpc(v, digits)

        def e(v):
            return None if v is None else format_mpfr(v, 6)

        ext_l, ext_r = self.extrapolated_lhs, self.extrapolated_rhs
        return {
            "kind": "limit",
            "identity": self.identity.value,
            "params": self.params.to_record(),
            "order": self.order,
            "precision_bits": self.bits,
            "rows": [
                {"k": r.k, "q": str(r.q), "lhs": z(r.lhs.value), "rhs": z(r.rhs.value),
                 "ratio": z(r.ratio), "lhs_err": e(r.lhs.err), "rhs_err": e(r.rhs.err)}
                for r in self.rows
            ],
            "extrapolated_lhs": z(None if ext_l is None else ext_l.value),
            "extrapolated_lhs_err": e(None if ext_l is None else ext_l.err),
            "extrapolated_rhs": z(None if ext_r is None else ext_r.value),
            "extrapolated_rhs_err": e(None if ext_r is None else ext_r.err),
            "max_ratio_deviation": e(self.max_ratio_deviation),
            "complete": self.exhausted is None,
            "closed_form": z(self.closed_form),
            "horn_value": z(self.horn_value),
            "lhs_via_H": z(self.lhs_via_H.value),
            "constant": z(self.constant),
            "stated_ratio": z(self.stated_ratio),
            "notes": list(self.notes),
        }

    def to_csv(self, digits: int = 30) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            ratio = r.ratio
            writer.writerow([
                r.k, str(r.q),
                format_mpfr(r.lhs.value.real, digits), format_mpfr(r.lhs.value.imag, digits),
                format_mpfr(r.rhs.value.real, digits), format_mpfr(r.rhs.value.imag, digits),
                format_mpfr(ratio.real, digits), format_mpfr(ratio.imag, digits),
                format_mpfr(r.lhs.err, 6), format_mpfr(r.rhs.err, 6),
            ])
        return buf.getvalue()


def limit_report(lp: LimitParams, k_min: int = 3, k_max: int = 10,
                 ctx: PrecisionContext | None = None, order: int = 3,
                 identity=IdentityId.COR1, workers: int = 1,
                 max_terms: int = LIMIT_MAX_TERMS) -> LimitTable:
    """Tabulate the normalised sides along ``q_k`` and extrapolate to ``q = 1``.

    A row whose series exceeds ``max_terms`` ends the table there; the rows
    before it are kept and ``exhausted`` records the reason.
    """
    ctx = ctx or PrecisionContext()
    identity = as_identity(identity)
    _b_value(lp)
    w = to_mpc(lp.w)
    with ctx.local():
        if abs(abs(w) - 1) > 16 * ctx.tol or abs(w - 1) <= 16 * ctx.tol:
            raise DomainError("the limit study needs |w| = 1 and w != 1")
    seq = q_sequence(k_min, k_max)
    if len(seq) < order + 1:
        raise InsufficientDataError(f"order {order} needs at least {order + 1} values of k")

    def row(item):
        k, base = item
        try:
            lhs = normalized_side("lhs", identity, lp, base, ctx, max_terms)
            rhs = normalized_side("rhs", identity, lp, base, ctx, max_terms)
        except BudgetError as exc:
            return f"k = {k}: {exc}"
        return LimitRow(k, base.q_exact, lhs, rhs)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(row, seq))
    else:
        results = []
        for item in seq:
            results.append(row(item))
            if isinstance(results[-1], str):
                break
    rows, exhausted = [], None
    for r in results:
        if isinstance(r, str):
            exhausted = r
            break
        rows.append(r)
    with ctx.local():
        ext_l = ext_r = None
        if len(rows) >= order + 1:
            eps = [mpfr(Fraction(1, 2**r.k)) for r in rows]
            ext_l = richardson_extrapolate(list(zip(eps, [r.lhs for r in rows])), order, ctx)
            ext_r = richardson_extrapolate(list(zip(eps, [r.rhs for r in rows])), order, ctx)
        closed = mainlim2_rhs(lp, ctx)
        horn = horn_anchor(lp, ctx)
        via_h = mainlim2_lhs_via_H(lp, ctx)
    table = LimitTable(lp, identity, order, ctx.bits, rows, ext_l, ext_r, closed, horn, via_h,
                       exhausted=exhausted)
    table.notes.append(
        "rows are the sides times (1-q^2)^b (alpha^2 beta^2;q^2)/(q^2;q^2),"
        " i.e. the weighted sides divided by Gamma_{q^2}(-b)")
    if exhausted:
        table.notes.append(f"term budget exhausted at {exhausted}")
    return table
