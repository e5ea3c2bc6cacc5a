"""Precision control, error-carrying values, the principal power, Euler's
gamma function and the bilateral hypergeometric sums 1H1 and 2H2.

All arithmetic runs on gmpy2 (MPFR/MPC).  Every public function takes a
:class:`PrecisionContext` and performs its work inside a thread-local gmpy2
context, so concurrent callers with different precisions do not interfere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import BranchPointError, BudgetError, DomainError, PoleError, PrecisionError
from .values import to_mpc

ComplexHP = mpc

DEFAULT_BITS = 256
DEFAULT_GUARD = 16


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision in bits and the guard bits reserved for rounding.

    ``tol`` is the truncation target ``2**-(bits - guard)`` used by every
    series evaluator that is able to reach it.
    """

    bits: int = DEFAULT_BITS
    guard: int = DEFAULT_GUARD

    def __post_init__(self) -> None:
        if not isinstance(self.bits, int) or self.bits < 64:
            raise ValueError(f"precision must be an integer >= 64 bits, got {self.bits!r}")
        if not isinstance(self.guard, int) or not 0 <= self.guard < self.bits:
            raise ValueError(f"guard bits must satisfy 0 <= guard < bits, got {self.guard!r}")

    def local(self):
        """A fresh gmpy2 context at this precision, for use in ``with``."""
        return gmpy2.context(precision=self.bits)

    @property
    def tol(self) -> mpfr:
        with self.local():
            return gmpy2.exp2(-(self.bits - self.guard))

    @property
    def unit_roundoff(self) -> mpfr:
        with self.local():
            return gmpy2.exp2(1 - self.bits)

    @property
    def digits(self) -> int:
        """Decimal digits worth printing at this precision."""
        return max(17, int((self.bits - self.guard) * math.log10(2)))

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(2 * self.bits, self.guard)


def _roundoff() -> mpfr:
    return gmpy2.exp2(2 - gmpy2.get_context().precision)


def check_finite(z, what: str = "value"):
    """Raise :class:`PrecisionError` if ``z`` carries an infinity or NaN."""
    parts = (z.real, z.imag) if isinstance(z, mpc) else (z,)
    for x in parts:
        if not gmpy2.is_finite(x):
            raise PrecisionError(f"{what} is not finite")
    return z


@dataclass(frozen=True, slots=True)
class Approx:
    """A complex value with an absolute error estimate.

    ``terms`` counts the series terms or product factors spent to obtain it.
    Arithmetic propagates first-order error bounds and adds one rounding unit
    per operation, using the precision of the active gmpy2 context.
    """

    value: mpc
    err: mpfr
    terms: int = 0

    @staticmethod
    def exact(x) -> "Approx":
        return Approx(to_mpc(x), mpfr(0), 0)

    @staticmethod
    def lift(x) -> "Approx":
        return x if isinstance(x, Approx) else Approx.exact(x)

    @property
    def abs(self) -> mpfr:
        return abs(self.value)

    def __add__(self, other) -> "Approx":
        o = Approx.lift(other)
        v = self.value + o.value
        return Approx(v, self.err + o.err + _roundoff() * abs(v), self.terms + o.terms)

    __radd__ = __add__

    def __neg__(self) -> "Approx":
        return Approx(-self.value, self.err, self.terms)

    def __sub__(self, other) -> "Approx":
        return self + (-Approx.lift(other))

    def __rsub__(self, other) -> "Approx":
        return Approx.lift(other) + (-self)

    def __mul__(self, other) -> "Approx":
        o = Approx.lift(other)
        v = self.value * o.value
        err = (
            abs(self.value) * o.err
            + abs(o.value) * self.err
            + self.err * o.err
            + _roundoff() * abs(v)
        )
        return Approx(v, err, self.terms + o.terms)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Approx":
        o = Approx.lift(other)
        den = abs(o.value)
        if den == 0:
            raise PoleError("division by an exactly vanishing quantity")
        if o.err >= den:
            raise PoleError("denominator is indistinguishable from zero")
        v = self.value / o.value
        err = (abs(self.value) * o.err + den * self.err) / (den * (den - o.err))
        return Approx(v, err + _roundoff() * abs(v), self.terms + o.terms)

    def __rtruediv__(self, other) -> "Approx":
        return Approx.lift(other) / self

    def scaled(self, factor: mpfr) -> "Approx":
        """Multiply by an exactly known real factor."""
        return Approx(self.value * factor, self.err * abs(factor), self.terms)


def _normalise_zero_imag(z: mpc) -> mpc:
    # gmpy2 keeps the sign of a zero imaginary part; -0 would put negative reals at arg -pi
    if z.imag == 0:
        return mpc(z.real, 0)
    return z


def principal_log(z) -> mpc:
    """Principal logarithm with ``arg`` in ``(-pi, pi]`` in the active context."""
    z = _normalise_zero_imag(to_mpc(z))
    if z == 0:
        raise BranchPointError("logarithm of zero")
    return gmpy2.log(z)


def on_branch_cut(z) -> bool:
    """True if ``z`` is a negative real, where ``arg z = pi`` by convention."""
    z = to_mpc(z)
    return z.imag == 0 and z.real < 0


def _ipow(z: mpc, n: int) -> mpc:
    if n < 0:
        return 1 / _ipow(z, -n)
    result = mpc(1)
    while n:
        if n & 1:
            result *= z
        n >>= 1
        if n:
            z *= z
    return result


def _as_small_int(x: mpc, limit: int = 1 << 20) -> int | None:
    if x.imag == 0 and gmpy2.is_integer(x.real) and abs(x.real) <= limit:
        return int(x.real)
    return None


def cpow_principal(base, exponent, ctx: PrecisionContext) -> mpc:
    """``base**exponent`` on the principal branch, ``arg base`` in ``(-pi, pi]``.

    Integer exponents use repeated multiplication, so the result carries no
    branch ambiguity.  ``0**e`` is ``0`` when ``Re e > 0``.
    """
    with ctx.local():
        b = to_mpc(base)
        e = to_mpc(exponent)
        if b == 0:
            if e.real > 0:
                return mpc(0)
            raise BranchPointError("0 raised to an exponent with non-positive real part")
        n = _as_small_int(e)
        if n is not None:
            return check_finite(_ipow(b, n), "power")
        return check_finite(gmpy2.exp(e * principal_log(b)), "power")


def is_nonpositive_integer(z: mpc) -> bool:
    return z.imag == 0 and z.real <= 0 and gmpy2.is_integer(z.real)


def _spouge_order(bits: int) -> int:
    # relative error of Spouge's formula is below a**-0.5 * (2*pi)**-(a+0.5)
    a = max(3, int((bits + 8) / math.log2(2 * math.pi)))
    while 0.5 * math.log2(a) + (a + 0.5) * math.log2(2 * math.pi) < bits + 8:
        a += 1
    return a


@lru_cache(maxsize=16)
def _spouge_coefficients(a: int, wbits: int) -> tuple[mpfr, ...]:
    with gmpy2.context(precision=wbits):
        coeffs = [gmpy2.sqrt(2 * gmpy2.const_pi())]
        fact = mpfr(1)
        for k in range(1, a):
            if k > 1:
                fact *= k - 1
            c = mpfr(a - k) ** (mpfr(k) - mpfr(0.5)) * gmpy2.exp(mpfr(a - k)) / fact
            coeffs.append(c if k % 2 == 1 else -c)
        return tuple(coeffs)


def _spouge_gamma_plus_one(x: mpc, a: int, coeffs) -> mpc:
    """Gamma(x + 1) for ``Re x > 0``."""
    s = mpc(coeffs[0])
    for k in range(1, a):
        s += coeffs[k] / (x + k)
    t = x + a
    return gmpy2.exp((x + mpfr(0.5)) * gmpy2.log(t) - t) * s


def gamma(z, ctx: PrecisionContext) -> mpc:
    """Euler's gamma function by Spouge's approximation with reflection.

    Raises :class:`PoleError` at ``z = 0, -1, -2, ...``.
    """
    with ctx.local():
        z = to_mpc(z)
        if is_nonpositive_integer(z):
            raise PoleError(f"gamma has a pole at {int(z.real)}")
    a = _spouge_order(ctx.bits)
    wbits = ctx.bits + 2 * a + 32
    coeffs = _spouge_coefficients(a, wbits)
    with gmpy2.context(precision=wbits):
        zw = mpc(z)
        if zw.real < 0.5:
            pi = gmpy2.const_pi()
            one_minus = 1 - zw
            g = _spouge_gamma_plus_one(one_minus, a, coeffs) / one_minus
            value = pi / (gmpy2.sin(pi * zw) * g)
        else:
            value = _spouge_gamma_plus_one(zw, a, coeffs) / zw
    with ctx.local():
        return check_finite(mpc(value), "gamma")


def shifted_factorial(alpha, n: int, ctx: PrecisionContext) -> mpc:
    """Pochhammer symbol ``(alpha)_n`` for any integer ``n``.

    For ``n < 0`` it equals ``1 / prod_{k=1}^{-n} (alpha - k)``.
    """
    with ctx.local():
        alpha = to_mpc(alpha)
        result = mpc(1)
        if n >= 0:
            for k in range(n):
                result *= alpha + k
            return result
        for k in range(1, -n + 1):
            f = alpha - k
            if f == 0:
                raise PoleError(f"({alpha})_{n} has a vanishing factor at k={k}")
            result *= f
        return 1 / result


def _unit_modulus_slack(ctx: PrecisionContext) -> mpfr:
    return 16 * ctx.tol


def _bilateral_hyper(nums, dens, z, ctx, tol, max_terms, name) -> Approx:
    """Symmetric partial sums of ``sum_n prod (a)_n / prod (b)_n z^n`` on ``|z| = 1``.

    The tail estimate uses summation by parts when ``z != 1`` and an integral
    comparison when ``z == 1``; both assume ``|u_n|`` decays like ``n**-s``
    with ``s = Re(sum b - sum a)``.
    """
    with ctx.local():
        nums = [to_mpc(a) for a in nums]
        dens = [to_mpc(b) for b in dens]
        z = to_mpc(z)
        if abs(abs(z) - 1) > _unit_modulus_slack(ctx):
            raise DomainError(f"{name} requires |z| = 1, got |z| = {float(abs(z)):.6g}")
        sigma = sum(dens, mpc(0)) - sum(nums, mpc(0))
        s = sigma.real
        if s <= 1:
            raise DomainError(f"{name} requires Re(sum of lower - upper parameters) > 1")
        z_is_one = abs(z - 1) <= _unit_modulus_slack(ctx)
        if z_is_one:
            z = mpc(1)
        target = mpfr(tol)
        inv_z = 1 / z
        one_minus_z = abs(1 - z)
        # past this index the ratio |u_{n+1}/u_n| behaves monotonically
        settle = int(2 * max(abs(x) for x in nums + dens)) + 4

        def tail(u_abs, n):
            if z_is_one:
                return 2 * u_abs * (mpfr(n) / (s - 1) + 1)
            return 4 * u_abs * (abs(sigma) / s + 1) / one_minus_z

        total = mpc(1)
        abs_sum = mpfr(1)
        z_pow = mpc(1)
        inv_z_pow = mpc(1)
        u_pos = mpc(1)
        u_neg = mpc(1)
        pos_done = neg_done = False
        pos_tail = neg_tail = mpfr(0)
        n = 0
        while True:
            n += 1
            if 2 * n + 1 > max_terms:
                raise BudgetError(
                    f"{name}: {max_terms} terms give tail estimate "
                    f"{float(max(pos_tail, neg_tail)):.3e} > {float(target):.3e}"
                )
            if not pos_done:
                num = mpc(1)
                for a in nums:
                    num *= a + (n - 1)
                if num == 0:
                    pos_done, pos_tail = True, mpfr(0)
                else:
                    den = mpc(1)
                    for b in dens:
                        den *= b + (n - 1)
                    if den == 0:
                        raise PoleError(f"{name}: lower parameter hits a pole at n={n - 1}")
                    u_pos = u_pos * num / den
                    z_pow *= z
                    term = u_pos * z_pow
                    total += term
                    abs_sum += abs(u_pos)
                    pos_tail = tail(abs(u_pos), n)
            if not neg_done:
                num = mpc(1)
                for b in dens:
                    num *= b - n
                if num == 0:
                    neg_done, neg_tail = True, mpfr(0)
                else:
                    den = mpc(1)
                    for a in nums:
                        den *= a - n
                    if den == 0:
                        raise PoleError(f"{name}: upper parameter hits a pole at n={-n}")
                    u_neg = u_neg * num / den
                    inv_z_pow *= inv_z
                    term = u_neg * inv_z_pow
                    total += term
                    abs_sum += abs(u_neg)
                    neg_tail = tail(abs(u_neg), n)
            scale = max(mpfr(1), abs(total))
            if n >= settle and pos_tail <= target * scale and neg_tail <= target * scale:
                break
            if pos_done and neg_done:
                break
        err = pos_tail + neg_tail + _roundoff() * (2 * n + 1) * abs_sum
        return Approx(check_finite(total, name), err, 2 * n + 1)


DEFAULT_ALGEBRAIC_TOL = 1e-12
DEFAULT_MAX_TERMS = 10**6


def eval_1H1(a, c, z, ctx: PrecisionContext, max_terms: int = DEFAULT_MAX_TERMS,
             tol=DEFAULT_ALGEBRAIC_TOL) -> Approx:
    """``sum_{n in Z} (a)_n / (c)_n z^n`` on the unit circle, ``z != 1``.

    Terms decay only algebraically, so the default requested tolerance is a
    fixed ``1e-12`` rather than the context tolerance.
    """
    with ctx.local():
        zz = to_mpc(z)
        if abs(zz - 1) <= _unit_modulus_slack(ctx):
            raise DomainError("1H1 diverges at z = 1")
    return _bilateral_hyper([a], [c], z, ctx, tol, max_terms, "1H1")


def eval_2H2(a, b, c, d, z, ctx: PrecisionContext, max_terms: int = DEFAULT_MAX_TERMS,
             tol=DEFAULT_ALGEBRAIC_TOL) -> Approx:
    """``sum_{n in Z} (a)_n (b)_n / ((c)_n (d)_n) z^n`` on the unit circle."""
    return _bilateral_hyper([a, b], [c, d], z, ctx, tol, max_terms, "2H2")


def horn_closed_form(a, c, z, ctx: PrecisionContext) -> mpc:
    """Closed form of 1H1(a; c; z) on ``|z| = 1``:

    ``(1-z)**(c-a-1) / (-z)**(c-1) * Gamma(1-a) Gamma(c) / Gamma(c-a)``.
    """
    with ctx.local():
        a, c, z = to_mpc(a), to_mpc(c), to_mpc(z)
        if z == 0:
            raise DomainError("closed form needs z != 0")
        if z == 1:
            raise DomainError("closed form is singular at z = 1")
        if (c - a).real <= 1:
            raise DomainError("closed form requires Re(c - a) > 1")
        power = cpow_principal(1 - z, c - a - 1, ctx) / cpow_principal(-z, c - 1, ctx)
        gam = gamma(1 - a, ctx) * gamma(c, ctx) / gamma(c - a, ctx)
        return check_finite(power * gam, "closed form")


def dougall_closed_form(a, b, c, d, ctx: PrecisionContext) -> mpc:
    """Closed form of 2H2(a, b; c, d; 1)."""
    with ctx.local():
        a, b, c, d = (to_mpc(x) for x in (a, b, c, d))
        if (c + d - a - b).real <= 1:
            raise DomainError("closed form requires Re(c + d - a - b) > 1")
        top = [1 - a, 1 - b, c, d, c + d - a - b - 1]
        bottom = [c - a, d - a, c - b, d - b]
        for arg in top + bottom:
            if is_nonpositive_integer(arg):
                raise PoleError(f"gamma argument {arg} is a pole")
        value = mpc(1)
        for arg in top:
            value *= gamma(arg, ctx)
        for arg in bottom:
            value /= gamma(arg, ctx)
        return check_finite(value, "closed form")
