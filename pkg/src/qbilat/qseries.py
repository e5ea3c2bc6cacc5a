"""q-Pochhammer symbols, the q-gamma function, Jacobi's theta function and
bilateral basic hypergeometric series.

The base is carried by :class:`QBase`, which stores the half power
``p = q**(1/2)`` (or ``q`` itself) as an exact rational so any precision can
be materialised on demand.  Products and series return :class:`Approx`
values whose error term is a rigorous truncation bound plus a rounding
estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .errors import BudgetError, DomainError, PoleError
from .numeric import Approx, PrecisionContext, check_finite, cpow_principal, is_nonpositive_integer
from .values import format_rational, parse_rational, to_mpc

DEFAULT_MAX_FACTORS = 10**7
DEFAULT_MAX_TERMS = 10**6
ANNULUS_MARGIN = 1e-3


def _exact(x) -> Fraction:
    if isinstance(x, str):
        return parse_rational(x)
    return Fraction(x)


@dataclass(frozen=True)
class QBase:
    """The nome ``q`` in ``(0, 1)``, known exactly through ``p`` or ``q``.

    Exactly one of ``p_exact`` and ``q_exact`` is set.  ``p`` is the half
    power, so half-integer powers of ``q`` are integer powers of ``p``.
    """

    p_exact: Fraction | None = None
    q_exact: Fraction | None = None

    def __post_init__(self) -> None:
        if (self.p_exact is None) == (self.q_exact is None):
            raise ValueError("give exactly one of p_exact and q_exact")
        name = "p_exact" if self.p_exact is not None else "q_exact"
        x = _exact(getattr(self, name))
        object.__setattr__(self, name, x)
        if not 0 < x < 1:
            raise DomainError(f"the base must lie in (0, 1), got {format_rational(x)}")

    @classmethod
    def from_q(cls, q) -> "QBase":
        return cls(q_exact=_exact(q))

    @classmethod
    def from_p(cls, p) -> "QBase":
        return cls(p_exact=_exact(p))

    def p(self, ctx: PrecisionContext) -> mpfr:
        with ctx.local():
            if self.p_exact is not None:
                return mpfr(mpq(self.p_exact))
            return gmpy2.sqrt(mpfr(mpq(self.q_exact)))

    def q(self, ctx: PrecisionContext) -> mpfr:
        with ctx.local():
            if self.q_exact is not None:
                return mpfr(mpq(self.q_exact))
            return mpfr(mpq(self.p_exact * self.p_exact))

    def squared(self) -> "QBase":
        """The base ``q**2``; its half power is ``q``."""
        if self.q_exact is not None:
            return QBase(p_exact=self.q_exact)
        return QBase(p_exact=self.p_exact**2)

    def q_value_exact(self) -> Fraction | None:
        if self.q_exact is not None:
            return self.q_exact
        return self.p_exact**2

    def __str__(self) -> str:
        if self.q_exact is not None:
            return format_rational(self.q_exact)
        return f"({format_rational(self.p_exact)})^2"


def as_base(base) -> QBase:
    return base if isinstance(base, QBase) else QBase.from_q(base)


def _roundoff() -> mpfr:
    return gmpy2.exp2(2 - gmpy2.get_context().precision)


def qpoch_finite(a, base, n: int, ctx: PrecisionContext) -> mpc:
    """``(a; q)_n`` for any integer ``n``; negative ``n`` inverts the shifted product."""
    base = as_base(base)
    with ctx.local():
        a = to_mpc(a)
        q = base.q(ctx)
        result = mpc(1)
        if n >= 0:
            qk = mpfr(1)
            for _ in range(n):
                result *= 1 - a * qk
                qk *= q
            return result
        qk = mpfr(1)
        for k in range(1, -n + 1):
            qk *= q
            f = 1 - a / qk
            if f == 0:
                raise PoleError(f"(a; q)_{n} has a vanishing factor 1 - a q^-{k}")
            result *= f
        return 1 / result


def qpoch_inf(a, base, ctx: PrecisionContext, tol=None,
              max_factors: int = DEFAULT_MAX_FACTORS) -> Approx:
    """``(a; q)_inf`` truncated once the relative tail bound drops below ``tol``.

    After ``K`` factors the omitted part ``prod_{k>=K}(1 - a q^k)`` differs
    from 1 by at most ``exp(d) - 1 <= 2 d`` with
    ``d = |a| q^K / ((1 - q)(1 - |a| q^K))``.
    """
    base = as_base(base)
    with ctx.local():
        target = ctx.tol if tol is None else mpfr(tol)
        a = to_mpc(a)
        q = base.q(ctx)
        one_minus_q = 1 - q
        real = a.imag == 0
        x = a.real if real else a
        product = mpfr(1) if real else mpc(1)
        mag = abs(a)
        k = 0
        while True:
            if mag < mpfr(0.5):
                delta = mag / (one_minus_q * (1 - mag))
                if 2 * delta <= target:
                    break
            if k >= max_factors:
                raise BudgetError(f"(a; q)_inf needs more than {max_factors} factors")
            product *= 1 - x
            if product == 0:
                return Approx(mpc(0), mpfr(0), k + 1)
            x *= q
            mag *= q
            k += 1
        value = mpc(product)
        err = abs(value) * (2 * delta + _roundoff() * (k + 1))
        return Approx(check_finite(value, "q-Pochhammer"), err, k)


def qpoch_multi(args, base, ctx: PrecisionContext, tol=None) -> Approx:
    """``(a_1, ..., a_k; q)_inf`` as a product of single symbols."""
    with ctx.local():
        result = Approx.exact(1)
        for a in args:
            result = result * qpoch_inf(a, base, ctx, tol)
        return result


def q_gamma(z, base, ctx: PrecisionContext) -> Approx:
    """``Gamma_q(z) = (q; q)_inf / (q^z; q)_inf * (1 - q)^(1 - z)``.

    Positive integers use the finite form ``(q; q)_{n-1} / (1 - q)^(n-1)``.
    """
    base = as_base(base)
    with ctx.local():
        z = to_mpc(z)
        if is_nonpositive_integer(z):
            raise PoleError(f"Gamma_q has a pole at {int(z.real)}")
        q = base.q(ctx)
        if z.imag == 0 and gmpy2.is_integer(z.real) and z.real <= 10**6:
            n = int(z.real)
            value = qpoch_finite(q, base, n - 1, ctx) / (1 - q) ** (n - 1)
            return Approx(value, _roundoff() * n * abs(value), n)
        qz = cpow_principal(q, z, ctx)
        num = qpoch_inf(q, base, ctx)
        den = qpoch_inf(qz, base, ctx)
        return num / den * Approx.exact(cpow_principal(1 - q, 1 - z, ctx))


def theta_series(z, base, ctx: PrecisionContext, tol=None,
                 max_terms: int = DEFAULT_MAX_TERMS) -> Approx:
    """``theta_q(z) = sum_n q^(n^2/2) (-z)^n``, truncated symmetrically.

    With ``r = max(|z|, 1/|z|)`` the omitted terms beyond ``|n| = N`` are
    bounded by a geometric series with ratio ``p^(2N+3) r``.
    """
    base = as_base(base)
    with ctx.local():
        target = ctx.tol if tol is None else mpfr(tol)
        z = to_mpc(z)
        if z == 0:
            raise DomainError("theta needs z != 0")
        p = base.p(ctx)
        p2 = p * p
        r = max(abs(z), 1 / abs(z))
        mz, mzi = -z, -1 / z
        total = mpc(1)
        abs_sum = mpfr(1)
        largest = mpfr(1)
        t_pos, t_neg = mpc(1), mpc(1)
        step = p  # p^(2n+1) for the step n -> n+1
        n = 0
        while True:
            t_pos = t_pos * step * mz
            t_neg = t_neg * step * mzi
            n += 1
            total += t_pos + t_neg
            a_pos, a_neg = abs(t_pos), abs(t_neg)
            abs_sum += a_pos + a_neg
            largest = max(largest, a_pos, a_neg)
            step *= p2
            ratio = step * r  # bounds every later step ratio
            if ratio < 1:
                bound_next = max(a_pos, a_neg) * ratio
                tail = 2 * bound_next / (1 - ratio)
                if tail <= target * largest:
                    break
            if 2 * n + 1 > max_terms:
                raise BudgetError(f"theta series needs more than {max_terms} terms")
        err = tail + _roundoff() * (2 * n + 1) * abs_sum
        return Approx(check_finite(total, "theta"), err, 2 * n + 1)


def theta_product(z, base, ctx: PrecisionContext) -> Approx:
    """Triple-product form ``(q, q^(1/2) z, q^(1/2) / z; q)_inf``."""
    base = as_base(base)
    with ctx.local():
        z = to_mpc(z)
        if z == 0:
            raise DomainError("theta needs z != 0")
        p = base.p(ctx)
        q = base.q(ctx)
        return qpoch_multi([q, p * z, p / z], base, ctx)


def theta_shift(z, k: int, base, ctx: PrecisionContext) -> Approx:
    """``theta_q(z q^k)`` through the quasi-periodicity factor
    ``(-z)^(-k) q^(-k^2/2) theta_q(z)``."""
    base = as_base(base)
    with ctx.local():
        z = to_mpc(z)
        p = base.p(ctx)
        factor = cpow_principal(-z, -k, ctx) * cpow_principal(p, -k * k, ctx)
        return theta_series(z, base, ctx) * Approx.exact(factor)


@dataclass(frozen=True)
class PsiSpec:
    """Numerator and denominator parameters of an ``r psi s`` series."""

    numerators: tuple = field(default_factory=tuple)
    denominators: tuple = field(default_factory=tuple)

    @property
    def r(self) -> int:
        return len(self.numerators)

    @property
    def s(self) -> int:
        return len(self.denominators)


def _terminates(params, q: mpfr, positive: bool) -> bool:
    """Whether a factor ``1 - a q^m`` (m >= 0) or ``1 - b q^-m`` (m >= 1) is exactly zero."""
    for x in params:
        if x == 0:
            continue
        qm = mpfr(1) if positive else q
        while True:
            y = x * qm if positive else x / qm
            if 1 - y == 0:
                return True
            if (abs(y) < 1) if positive else (abs(y) > 1):
                break
            qm = qm * q if positive else qm * q
    return False


def psi_bilateral(spec: PsiSpec, base, z, ctx: PrecisionContext, *,
                  tol=None, max_terms: int = DEFAULT_MAX_TERMS,
                  margin: float = ANNULUS_MARGIN, allow_boundary: bool = False) -> Approx:
    """Bilateral series
    ``sum_n prod (a_i; q)_n / prod (b_j; q)_n ((-1)^n q^(n(n-1)/2))^(s-r) z^n``.

    Both halves are summed until a rigorous geometric tail bound falls below
    ``tol`` relative to the largest term.  Points within ``margin`` of the
    convergence boundary are rejected unless ``allow_boundary`` is set.
    """
    base = as_base(base)
    r, s = spec.r, spec.s
    if r > s:
        raise DomainError("r psi s with r > s diverges for every z != 0")
    with ctx.local():
        target = ctx.tol if tol is None else mpfr(tol)
        nums = [to_mpc(a) for a in spec.numerators]
        dens = [to_mpc(b) for b in spec.denominators]
        z = to_mpc(z)
        if z == 0:
            raise DomainError("bilateral series needs z != 0")
        q = base.q(ctx)
        abs_z = abs(z)
        num_mag = [abs(a) for a in nums]
        den_mag = [abs(b) for b in dens]
        prod_a = mpfr(1)
        for m in num_mag:
            prod_a *= m
        prod_b = mpfr(1)
        for m in den_mag:
            prod_b *= m
        pos_finite = _terminates(nums, q, positive=True)
        neg_finite = _terminates(dens, q, positive=False)
        if prod_a == 0 and not neg_finite:
            raise DomainError("the negative half diverges when a numerator parameter is 0")
        rho_neg = mpfr(0) if neg_finite else prod_b / (prod_a * abs_z)
        rho_pos = abs_z if r == s and not pos_finite else mpfr(0)
        limit = 1 if allow_boundary else 1 - margin
        if rho_pos >= limit:
            raise DomainError(
                f"|z| = {float(abs_z):.6g} is not inside the annulus (needs < {float(limit):.6g})"
            )
        if rho_neg >= limit:
            raise DomainError(
                f"|b/(a z)| = {float(rho_neg):.6g} is not inside the annulus "
                f"(needs < {float(limit):.6g})"
            )
        extra = s - r
        total = mpc(1)
        abs_sum = mpfr(1)
        largest = mpfr(1)
        t_pos, t_neg = mpc(1), mpc(1)
        pos_done = neg_done = False
        pos_tail = neg_tail = mpfr(0)
        qn = mpfr(1)  # q^n for the positive step n -> n+1
        qk = mpfr(1)  # q^k for the negative step, k = m + 1
        inv_z = 1 / z
        n = 0
        while True:
            if not pos_done:
                num = mpc(1)
                for a in nums:
                    num *= 1 - a * qn
                if num == 0:
                    pos_done, pos_tail = True, mpfr(0)
                else:
                    den = mpc(1)
                    for b in dens:
                        den *= 1 - b * qn
                    if den == 0:
                        raise PoleError(f"denominator parameter vanishes at n={n + 1}")
                    step = num / den * z
                    if extra:
                        step *= (-qn) ** extra
                    t_pos *= step
                    total += t_pos
                    a_pos = abs(t_pos)
                    abs_sum += a_pos
                    largest = max(largest, a_pos)
            qn *= q
            qk *= q
            if not neg_done:
                num = mpc(1)
                for b in dens:
                    num *= 1 - b / qk
                if num == 0:
                    neg_done, neg_tail = True, mpfr(0)
                else:
                    den = mpc(1)
                    for a in nums:
                        den *= 1 - a / qk
                    if den == 0:
                        raise PoleError(f"numerator parameter gives a pole at n={-(n + 1)}")
                    step = num / den * inv_z
                    if extra:
                        step *= (-qk) ** extra
                    t_neg *= step
                    total += t_neg
                    a_neg = abs(t_neg)
                    abs_sum += a_neg
                    largest = max(largest, a_neg)
            n += 1
            scale = target * largest
            if not pos_done:
                # every later step ratio is at most this, since q^j <= q^n
                bound = abs_z * (qn ** extra if extra else 1)
                ok = True
                for m in num_mag:
                    bound *= 1 + m * qn
                for m in den_mag:
                    d = 1 - m * qn
                    if d <= 0:
                        ok = False
                        break
                    bound /= d
                pos_tail = a_pos * bound / (1 - bound) if ok and bound < 1 else None
            if not neg_done:
                x = qk * q  # q^(k+1) bounds all later q^k
                bound = 1 / abs_z
                ok = True
                for m in den_mag:
                    bound *= m + x
                for m in num_mag:
                    d = m - x
                    if d <= 0:
                        ok = False
                        break
                    bound /= d
                neg_tail = a_neg * bound / (1 - bound) if ok and bound < 1 else None
            if (pos_tail is not None and neg_tail is not None
                    and pos_tail <= scale and neg_tail <= scale):
                break
            if 2 * n + 1 >= max_terms:
                raise BudgetError(
                    f"bilateral series needs more than {max_terms} terms "
                    f"(|z| = {float(abs_z):.6g}, |b/(a z)| = {float(rho_neg):.6g})"
                )
        err = pos_tail + neg_tail + _roundoff() * (2 * n + 1) * abs_sum
        return Approx(check_finite(total, "bilateral series"), err, 2 * n + 1)


def ramanujan_rhs(a, b, base, z, ctx: PrecisionContext) -> Approx:
    """Product side of Ramanujan's 1psi1 sum,
    ``(q, b/a, a z, q/(a z); q)_inf / (b, q/a, z, b/(a z); q)_inf``."""
    base = as_base(base)
    with ctx.local():
        a, b, z = to_mpc(a), to_mpc(b), to_mpc(z)
        if a == 0 or z == 0:
            raise DomainError("Ramanujan's sum needs a != 0 and z != 0")
        if not abs(b / a) < abs(z) < 1:
            raise DomainError("Ramanujan's sum needs |b/a| < |z| < 1")
        q = base.q(ctx)
        num = qpoch_multi([q, b / a, a * z, q / (a * z)], base, ctx)
        den = qpoch_multi([b, q / a, z, b / (a * z)], base, ctx)
        if den.value == 0:
            raise PoleError("a denominator product (b, q/a, z, b/(az); q)_inf vanishes")
        return num / den
