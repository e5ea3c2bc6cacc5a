"""Truncated formal Laurent series in ``p = q^(1/2)`` with exact rational
coefficients, and coefficientwise checks of identities at rational parameters.

A series knows its coefficients up to and including ``p^order``; an
``order`` of ``None`` marks an exact Laurent polynomial.  Arithmetic never
claims more than its operands justify, so a check that loses precision
reports a lower order instead of a wrong coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .catalog import IdentityId, as_identity
from .errors import DomainError, NotInvertibleError, PoleError, PrecisionContractError
from .values import parse_rational

__all__ = [
    "LaurentSeries",
    "Mono",
    "RationalParams",
    "FormalThetaParams",
    "FormalPairParams",
    "FormalReport",
    "FORMAL_IDENTITIES",
    "DEFAULT_POINTS",
    "ls_add",
    "ls_neg",
    "ls_mul",
    "ls_inv",
    "ls_qpoch_inf",
    "ls_theta",
    "ls_psi11",
    "formal_sides",
    "formal_check",
]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def _min_order(*orders):
    known = [o for o in orders if o is not None]
    return min(known) if known else None


class LaurentSeries:
    """``sum_k c_k p^k`` for ``start <= k``, known through ``p^order``."""

    __slots__ = ("start", "coeffs", "order")

    def __init__(self, start: int, coeffs: Iterable, order: int | None = None):
        cs = [_frac(c) for c in coeffs]
        if order is not None:
            keep = order - start + 1
            cs = cs[:max(keep, 0)]
        lead = 0
        while lead < len(cs) and cs[lead] == 0:
            lead += 1
        start += lead
        cs = cs[lead:]
        if order is None:
            while cs and cs[-1] == 0:
                cs.pop()
        if not cs:
            start = 0 if order is None else order + 1
        self.start = start
        self.coeffs = tuple(cs)
        self.order = order

    # construction

    @classmethod
    def zero(cls, order: int | None = None) -> "LaurentSeries":
        return cls(0, (), order)

    @classmethod
    def const(cls, c, order: int | None = None) -> "LaurentSeries":
        return cls(0, (c,), order)

    @classmethod
    def monomial(cls, c, k: int, order: int | None = None) -> "LaurentSeries":
        return cls(k, (c,), order)

    @classmethod
    def from_dict(cls, terms: dict, order: int | None = None) -> "LaurentSeries":
        if not terms:
            return cls.zero(order)
        lo, hi = min(terms), max(terms)
        return cls(lo, [terms.get(k, 0) for k in range(lo, hi + 1)], order)

    # inspection

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def exact(self) -> bool:
        return self.order is None

    @property
    def valuation(self) -> int | None:
        """Lowest exponent with a nonzero coefficient (``order + 1`` for a
        truncated zero, ``None`` for the exact zero)."""
        if self.coeffs:
            return self.start
        return None if self.order is None else self.order + 1

    def coeff(self, k: int) -> Fraction:
        if self.order is not None and k > self.order:
            raise PrecisionContractError(f"coefficient of p^{k} is beyond the known order {self.order}")
        i = k - self.start
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def terms(self) -> dict[int, Fraction]:
        return {self.start + i: c for i, c in enumerate(self.coeffs) if c != 0}

    def as_mono(self) -> "Mono | None":
        if self.exact and len(self.coeffs) == 1:
            return Mono(self.coeffs[0], self.start)
        return None

    def truncate(self, order: int) -> "LaurentSeries":
        return LaurentSeries(self.start, self.coeffs, _min_order(self.order, order))

    def evaluate(self, p) -> Fraction:
        """Exact value of the known part at a rational ``p``."""
        p = _frac(p)
        if p == 0 and self.start < 0:
            raise PoleError("a negative power of p at p = 0")
        return sum((c * p ** (self.start + i) for i, c in enumerate(self.coeffs)), Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return (self.start, self.coeffs, self.order) == (other.start, other.coeffs, other.order)

    def __hash__(self) -> int:
        return hash((self.start, self.coeffs, self.order))

    def __repr__(self) -> str:
        body = " + ".join(f"({c})p^{self.start + i}" for i, c in enumerate(self.coeffs) if c) or "0"
        tail = "" if self.order is None else f" + O(p^{self.order + 1})"
        return f"LaurentSeries({body}{tail})"

    # arithmetic

    def __add__(self, other):
        return ls_add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ls_add(self, ls_neg(_coerce(other)))

    def __rsub__(self, other):
        return ls_add(_coerce(other), ls_neg(self))

    def __neg__(self):
        return ls_neg(self)

    def __mul__(self, other):
        return ls_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return ls_mul(self, ls_inv(_coerce(other)))

    def __rtruediv__(self, other):
        return ls_mul(_coerce(other), ls_inv(self))

    def scale(self, c) -> "LaurentSeries":
        c = _frac(c)
        return LaurentSeries(self.start, [c * x for x in self.coeffs], self.order)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by ``p^k`` exactly."""
        return LaurentSeries(self.start + k, self.coeffs,
                             None if self.order is None else self.order + k)

    def mul_binomial(self, c, m: int) -> "LaurentSeries":
        """Multiply by ``1 - c p^m`` in linear time."""
        c = _frac(c)
        if c == 0:
            return self
        return ls_add(self, self.shift(m).scale(-c))

    def div_binomial(self, c, m: int) -> "LaurentSeries":
        """Divide by ``1 - c p^m`` in linear time."""
        c = _frac(c)
        if c == 0:
            return self
        if m == 0:
            if c == 1:
                raise NotInvertibleError("division by 1 - 1")
            return self.scale(1 / (1 - c))
        if m < 0:
            # 1 - c p^m = -c p^m (1 - p^-m / c)
            return self.shift(-m).scale(-1 / c).div_binomial(1 / c, -m)
        if self.order is None:
            raise PrecisionContractError("dividing an exact series needs a truncation order")
        n = self.order - self.start + 1
        out = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        for i in range(m, n):
            out[i] += c * out[i - m]
        return LaurentSeries(self.start, out, self.order)


def _coerce(x) -> LaurentSeries:
    if isinstance(x, LaurentSeries):
        return x
    if isinstance(x, Mono):
        return x.series()
    return LaurentSeries.const(_frac(x))


def ls_neg(x: LaurentSeries) -> LaurentSeries:
    return LaurentSeries(x.start, [-c for c in x.coeffs], x.order)


def ls_add(x: LaurentSeries, y: LaurentSeries) -> LaurentSeries:
    order = _min_order(x.order, y.order)
    if not x.coeffs and not y.coeffs:
        return LaurentSeries.zero(order)
    if not x.coeffs:
        x, y = y, x
    lo = x.start if not y.coeffs else min(x.start, y.start)
    hi = max(x.start + len(x.coeffs), y.start + len(y.coeffs) if y.coeffs else 0) - 1
    if order is not None:
        hi = min(hi, order)
    out = [Fraction(0)] * max(hi - lo + 1, 0)
    for s in (x, y):
        for i, c in enumerate(s.coeffs):
            k = s.start + i - lo
            if k < len(out):
                out[k] += c
    return LaurentSeries(lo, out, order)


def ls_mul(x: LaurentSeries, y: LaurentSeries) -> LaurentSeries:
    """Exact product; a truncated operand limits the order by the other's valuation."""
    if (x.exact and x.is_zero()) or (y.exact and y.is_zero()):
        return LaurentSeries.zero()
    vx, vy = x.valuation, y.valuation
    cands = []
    if x.order is not None:
        cands.append(x.order + vy)
    if y.order is not None:
        cands.append(y.order + vx)
    order = min(cands) if cands else None
    if x.is_zero() or y.is_zero():
        return LaurentSeries.zero(order)
    lo = x.start + y.start
    hi = x.start + len(x.coeffs) + y.start + len(y.coeffs) - 2
    if order is not None:
        hi = min(hi, order)
    n = hi - lo + 1
    if n <= 0:
        return LaurentSeries.zero(order)
    out = [Fraction(0)] * n
    ys = y.coeffs
    for i, a in enumerate(x.coeffs):
        if i >= n:
            break
        if a == 0:
            continue
        for j in range(min(len(ys), n - i)):
            out[i + j] += a * ys[j]
    return LaurentSeries(lo, out, order)


def ls_inv(x: LaurentSeries, order: int | None = None) -> LaurentSeries:
    """``1/x``.  A truncated ``x`` known through ``p^N`` with valuation ``v``
    gives an inverse known through ``p^(N - 2v)``; an exact ``x`` with more
    than one term needs ``order``."""
    if x.is_zero():
        raise NotInvertibleError("the series has no nonzero known coefficient")
    v = x.start
    mono = x.as_mono()
    if mono is not None:
        inv = LaurentSeries.monomial(1 / mono.c, -mono.k)
        return inv if order is None else inv.truncate(order)
    if x.exact:
        if order is None:
            raise PrecisionContractError("inverting an exact polynomial needs a truncation order")
        target = order
    else:
        target = _min_order(x.order - 2 * v, order)
    n = target + v + 1
    if n <= 0:
        return LaurentSeries.zero(target)
    c = x.coeffs
    c0 = c[0]
    y = [Fraction(0)] * n
    y[0] = 1 / c0
    for k in range(1, n):
        acc = Fraction(0)
        for j in range(1, min(k, len(c) - 1) + 1):
            acc += c[j] * y[k - j]
        y[k] = -acc / c0
    return LaurentSeries(-v, y, target)


@dataclass(frozen=True)
class Mono:
    """The monomial ``c p^k``."""

    c: Fraction
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "c", _frac(self.c))

    def __mul__(self, other):
        if isinstance(other, Mono):
            return Mono(self.c * other.c, self.k + other.k)
        return Mono(self.c * _frac(other), self.k)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Mono):
            if other.c == 0:
                raise PoleError("division by a zero monomial")
            return Mono(self.c / other.c, self.k - other.k)
        return Mono(self.c / _frac(other), self.k)

    def __rtruediv__(self, other):
        return Mono(_frac(other), 0) / self

    def __neg__(self):
        return Mono(-self.c, self.k)

    def __pow__(self, n: int):
        return Mono(self.c**n, self.k * n)

    def series(self, order: int | None = None) -> LaurentSeries:
        return LaurentSeries.monomial(self.c, self.k, order)


P = Mono(1, 1)
Q = Mono(1, 2)


def _as_param(a):
    """Monomials stay monomials; anything else becomes a series."""
    if isinstance(a, Mono):
        return a
    if isinstance(a, LaurentSeries):
        m = a.as_mono()
        return m if m is not None else a
    return Mono(_frac(a), 0)


def _one_minus(a, n: int) -> LaurentSeries:
    # 1 - a p^n as a series
    if isinstance(a, Mono):
        return LaurentSeries.from_dict({0: 1} if a.c == 0 else _merge({0: 1}, {a.k + n: -a.c}))
    return LaurentSeries.const(1) - a.shift(n)


def _merge(x: dict, y: dict) -> dict:
    out = dict(x)
    for k, v in y.items():
        out[k] = out.get(k, 0) + v
    return out


def _times_factor(acc: LaurentSeries, a, n: int) -> LaurentSeries:
    """``acc (1 - a p^n)``."""
    if isinstance(a, Mono):
        return acc.mul_binomial(a.c, a.k + n)
    return acc * _one_minus(a, n)


def _over_factor(acc: LaurentSeries, a, n: int, order: int) -> LaurentSeries:
    """``acc / (1 - a p^n)``."""
    try:
        if isinstance(a, Mono):
            return acc.div_binomial(a.c, a.k + n)
        return acc * ls_inv(_one_minus(a, n), order)
    except NotInvertibleError as exc:
        raise PoleError(f"a factor 1 - a q^k vanishes: {exc}") from exc


def _valuation(a) -> int:
    if isinstance(a, Mono):
        if a.c == 0:
            raise DomainError("parameter is zero")
        return a.k
    v = a.valuation
    if v is None:
        raise DomainError("parameter is zero")
    return v


def ls_qpoch_inf(a, base_power: int, N: int) -> LaurentSeries:
    """``(a; q^base_power)_inf`` known through ``p^N``; ``q = p^2``.

    Only the factors ``1 - a q^(base_power k)`` with valuation at most ``N``
    differ from 1 modulo ``p^(N+1)``.
    """
    if base_power not in (1, 2):
        raise ValueError("base_power must be 1 or 2")
    a = _as_param(a)
    v = _valuation(a)
    if v < 0:
        raise PrecisionContractError("(a; q)_inf needs a parameter of valuation >= 0")
    step = 2 * base_power
    acc = LaurentSeries.const(1, N)
    n = 0
    while v + n <= N:
        acc = _times_factor(acc, a, n)
        n += step
    return acc


def ls_theta(z, base_power: int, N: int) -> LaurentSeries:
    """``theta(z) = sum_n q^(base_power n^2/2) (-z)^n`` known through ``p^N``."""
    if base_power not in (1, 2):
        raise ValueError("base_power must be 1 or 2")
    z = _as_param(z)
    v = _valuation(z)

    def exponent(n):
        return base_power * n * n + n * v

    # the exponent is a convex quadratic in n, so the contributing n form an interval
    lo, hi = 0, 0
    while exponent(lo - 1) <= N or exponent(lo - 1) < exponent(lo):
        lo -= 1
    while exponent(hi + 1) <= N or exponent(hi + 1) < exponent(hi):
        hi += 1
    if isinstance(z, Mono):
        terms: dict[int, Fraction] = {}
        for n in range(lo, hi + 1):
            e = exponent(n)
            if e <= N:
                terms[e] = terms.get(e, 0) + (-z.c) ** n
        return LaurentSeries.from_dict(terms, N)
    # powers of a general series lose order through the inverse; pad generously
    work = N + 2 * abs(v) * max(-lo, hi) + 2
    mz = ls_neg(z.truncate(work))
    inv = ls_inv(mz, work)
    total = LaurentSeries.zero(N)
    up, down = LaurentSeries.const(1), LaurentSeries.const(1)
    for n in range(0, hi + 1):
        if n > 0:
            up = up * mz
        total = total + up.shift(base_power * n * n)
    for n in range(1, -lo + 1):
        down = down * inv
        total = total + down.shift(base_power * n * n)
    return total


def ls_psi11(a, b, z, N: int) -> LaurentSeries:
    """``sum_n (a;q)_n/(b;q)_n z^n`` known through ``p^N``.

    Needs ``valuation(z) >= 1`` and ``valuation(b/(a z)) >= 1``, with
    ``a, b, q/a, q/b`` of nonnegative valuation, so that only ``|n| <= N``
    contribute.
    """
    a, b, z = _as_param(a), _as_param(b), _as_param(z)
    va, vb, vz = _valuation(a), _valuation(b), _valuation(z)
    if vz < 1:
        raise PrecisionContractError("1psi1 needs valuation(z) >= 1")
    if vb - va - vz < 1:
        raise PrecisionContractError("1psi1 needs valuation(b/(a z)) >= 1")
    if min(va, vb) < 0 or min(2 - va, 2 - vb) < 0:
        raise PrecisionContractError("1psi1 needs a, b, q/a and q/b of valuation >= 0")

    def lift(x):
        return x if isinstance(x, LaurentSeries) else x.series()

    def mul(acc, x):
        m = x if isinstance(x, Mono) else None
        if m is not None:
            return acc.scale(m.c).shift(m.k)
        return acc * x

    qa = Q / a if isinstance(a, Mono) else lift(Q.series()) / lift(a).truncate(N + 2 * va + 4)
    qb = Q / b if isinstance(b, Mono) else lift(Q.series()) / lift(b).truncate(N + 2 * vb + 4)
    if isinstance(b, Mono) and isinstance(a, Mono) and isinstance(z, Mono):
        ratio = b / (a * z)
    else:
        ratio = lift(b) / (lift(a) * lift(z)).truncate(N + 8)
    total = LaurentSeries.const(1, N)
    term = LaurentSeries.const(1, N)
    for n in range(1, N + 1):
        term = _times_factor(term, a, 2 * (n - 1))
        term = _over_factor(term, b, 2 * (n - 1), N)
        term = mul(term, z).truncate(N)
        if term.is_zero() and term.exact:
            break
        total = total + term
    term = LaurentSeries.const(1, N)
    for n in range(1, N + 1):
        term = _times_factor(term, qb, 2 * (n - 1))
        term = _over_factor(term, qa, 2 * (n - 1), N)
        term = mul(term, ratio).truncate(N)
        total = total + term
    return total


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class RationalParams:
    """Rational ``beta`` and ``w``; ``alpha = -1/beta^2`` and ``gamma = p^2/beta``."""

    beta: Fraction
    w: Fraction

    def __post_init__(self):
        object.__setattr__(self, "beta", _frac(self.beta))
        object.__setattr__(self, "w", _frac(self.w))
        if self.beta == 0 or self.w == 0:
            raise DomainError("beta and w must be nonzero")

    def to_record(self) -> dict:
        return {"beta": str(self.beta), "w": str(self.w)}


@dataclass(frozen=True)
class FormalThetaParams:
    z: Fraction
    k: int = 1

    def __post_init__(self):
        object.__setattr__(self, "z", _frac(self.z))
        if self.z == 0:
            raise DomainError("theta needs z != 0")

    def to_record(self) -> dict:
        return {"z": str(self.z), "k": self.k}


@dataclass(frozen=True)
class FormalPairParams:
    xi: Fraction
    eta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "xi", _frac(self.xi))
        object.__setattr__(self, "eta", _frac(self.eta))
        if self.xi == 0 or self.eta == 0:
            raise DomainError("xi and eta must be nonzero")

    def to_record(self) -> dict:
        return {"xi": str(self.xi), "eta": str(self.eta)}


DEFAULT_POINTS: tuple[RationalParams, ...] = (
    RationalParams(Fraction(2, 3), Fraction(1, 5)),
    RationalParams(Fraction(-3, 5), Fraction(2, 7)),
    RationalParams(Fraction(1, 2), Fraction(-1, 3)),
)


class _Sym:
    """alpha, beta, gamma, w and z as monomials in p."""

    def __init__(self, params: RationalParams):
        self.beta = Mono(params.beta)
        self.w = Mono(params.w)
        self.alpha = -1 / (self.beta * self.beta)
        self.gamma = Q / self.beta
        self.ab = self.alpha * self.beta
        self.z = self.gamma * self.w / (self.alpha * P)


def _poch(args: Sequence, base_power: int, N: int) -> LaurentSeries:
    out = LaurentSeries.const(1, N)
    for a in args:
        out = out * ls_qpoch_inf(a, base_power, N)
    return out


def _series_pair(s: _Sym, N: int, sign: int) -> LaurentSeries:
    al, be, ga = s.alpha, s.beta, s.gamma
    first = _poch([ga / al], 1, N) / _poch([s.ab], 1, N) * ls_psi11(s.ab, ga / al, s.z, N)
    second = _poch([be * be * ga], 1, N) / _poch([1 / be], 1, N) * ls_psi11(1 / be, be * be * ga, s.z, N)
    inner = first + second if sign > 0 else first - second
    return inner.scale(Fraction(1, 2))


def _q_ratio(N: int) -> LaurentSeries:
    return _poch([Q], 2, N) / _poch([Q * Q], 2, N)


def _main_product(s: _Sym, N: int, shifted: bool) -> LaurentSeries:
    al, be, ga, w = s.alpha, s.beta, s.gamma, s.w
    lead = _poch([ga / (al * al * be)], 2, N) / _poch([al * al * be * be], 2, N)
    if not shifted:
        num = _poch([al * P * Q / (ga * w), s.ab * w * Q / P], 2, N)
        den = _poch([ga * w / (al * P), P / (s.ab * w)], 2, N)
        return lead * num / den
    num = _poch([al * P * Q * Q / (ga * w), s.ab * w * Q * Q / P], 2, N)
    den = _poch([ga * w * P / al, Q * P / (s.ab * w)], 2, N)
    return lead * num / den * s.ab.series()


def _theta2(x, N):
    return ls_theta(x, 2, N)


def _theta(x, N):
    return ls_theta(x, 1, N)


def _co5_pieces(s: _Sym, N: int):
    t1 = _theta(s.ab / P, N) * _theta(s.w / (s.alpha * s.beta * s.beta), N)
    t2 = _theta(s.w, N) * _theta(1 / (s.beta * P), N)
    return t1, t2


def _recip_theta2(s: _Sym, N: int, shifted: bool) -> LaurentSeries:
    x = s.ab * P if shifted else s.ab / P
    prod = _theta2(x / s.w, N) * _theta2(x * s.w, N)
    return 1 / prod


def _brackets(s: _Sym, N: int):
    be, ga, w = s.beta, s.gamma, s.w
    br1 = _poch([be * ga * w / P, Q * P / (be * ga * w), 1 / be, Q * be], 1, N)
    br2 = _poch([ga * w / (s.ab * P), s.ab * Q * P / (ga * w), s.ab, Q / s.ab], 1, N)
    return br1, br2


def _pairs(s: _Sym, N: int):
    al, ga, w = s.alpha, s.gamma, s.w
    up1 = _poch([al * P * Q / (ga * w), s.ab * w * Q / P], 2, N)
    up2 = _poch([al * P * Q * Q / (ga * w), s.ab * w * Q * Q / P], 2, N)
    low0 = _poch([ga * w / (al * P), P / (s.ab * w)], 2, N)
    low1 = _poch([ga * w * Q / (al * P), P * Q / (s.ab * w)], 2, N)
    return up1, up2, low0, low1


def _half_qq(N: int) -> LaurentSeries:
    return _poch([Q, Q], 2, N).scale(Fraction(1, 2))


def _ab_series(s: _Sym) -> LaurentSeries:
    return s.ab.series()


def _sides_constrained(identity: IdentityId, params: RationalParams, N: int):
    s = _Sym(params)
    if identity is IdentityId.MAIN1:
        return _q_ratio(N) * _series_pair(s, N, +1), _main_product(s, N, False)
    if identity is IdentityId.MAIN2:
        return _q_ratio(N) * _series_pair(s, N, -1), _main_product(s, N, True)
    if identity is IdentityId.COR1:
        return _series_pair(s, N, +1), _main_product(s, N, False) / _q_ratio(N)
    if identity is IdentityId.COR2:
        return _series_pair(s, N, -1), _main_product(s, N, True) / _q_ratio(N)
    if identity is IdentityId.CO5:
        t1, t2 = _co5_pieces(s, N)
        return _recip_theta2(s, N, False), 2 / (t1 + t2)
    if identity is IdentityId.COROL1:
        t1, t2 = _co5_pieces(s, N)
        return _recip_theta2(s, N, True), _ab_series(s).scale(2) / (t2 - t1)
    br1, br2 = _brackets(s, N)
    up1, up2, low0, low1 = _pairs(s, N)
    if identity is IdentityId.CO6:
        return LaurentSeries.const(1), _half_qq(N) / (up1 * low1) * (br1 + br2)
    if identity is IdentityId.CO7:
        return up1, _half_qq(N) / low1 * (br1 + br2)
    if identity is IdentityId.CORO1:
        return _ab_series(s), _half_qq(N) / (up2 * low0) * (br1 - br2)
    if identity is IdentityId.CORO2:
        return _ab_series(s) * up2, _half_qq(N) / low1 * (br1 - br2)
    if identity is IdentityId.RAMANUJAN:
        a, b, z = s.ab, s.gamma / s.alpha, s.z
        lhs = ls_psi11(a, b, z, N)
        rhs = _poch([Q, b / a, a * z, Q / (a * z)], 1, N) / _poch([b, Q / a, z, b / (a * z)], 1, N)
        return lhs, rhs
    if identity is IdentityId.QBINOM:
        a, z = s.ab, s.z
        return ls_psi11(a, Q, z, N), _poch([a * z], 1, N) / _poch([z], 1, N)
    raise DomainError(f"{identity} has no formal form for (beta, w) parameters")


def _sides_theta(identity: IdentityId, params: FormalThetaParams, N: int):
    z = Mono(params.z)
    if identity is IdentityId.JTP:
        return _theta(z, N), _poch([Q, P * z, P / z], 1, N)
    if identity is IdentityId.THETA_INV:
        return _theta(z, N), _theta(1 / z, N)
    if identity is IdentityId.THETA_QDIFF:
        k = params.k
        lhs = _theta(z * Q**k, N + k * k)
        rhs = _theta(z, N + k * k) * Mono((-z.c) ** (-k), -k * k).series()
        return lhs, rhs
    raise DomainError(f"{identity} has no formal form for theta parameters")


def _sides_pair(identity: IdentityId, params: FormalPairParams, N: int):
    if identity is IdentityId.P1:
        xi, eta = Mono(params.xi), Mono(params.eta)
        return _theta2(xi / eta, N) * _theta2(xi * eta, N), _theta(xi, N) * _theta(-eta, N)
    raise DomainError(f"{identity} has no formal form for (xi, eta) parameters")


FORMAL_IDENTITIES: dict[IdentityId, type] = {
    IdentityId.MAIN1: RationalParams,
    IdentityId.MAIN2: RationalParams,
    IdentityId.COR1: RationalParams,
    IdentityId.COR2: RationalParams,
    IdentityId.P1: FormalPairParams,
    IdentityId.CO5: RationalParams,
    IdentityId.COROL1: RationalParams,
    IdentityId.CO6: RationalParams,
    IdentityId.CO7: RationalParams,
    IdentityId.CORO1: RationalParams,
    IdentityId.CORO2: RationalParams,
    IdentityId.JTP: FormalThetaParams,
    IdentityId.THETA_INV: FormalThetaParams,
    IdentityId.THETA_QDIFF: FormalThetaParams,
    IdentityId.RAMANUJAN: RationalParams,
    IdentityId.QBINOM: RationalParams,
}

_DISPATCH: dict[type, Callable] = {
    RationalParams: _sides_constrained,
    FormalThetaParams: _sides_theta,
    FormalPairParams: _sides_pair,
}


def formal_sides(identity, params, N: int) -> tuple[LaurentSeries, LaurentSeries]:
    """Both sides computed with every source series truncated at ``p^N``.

    The returned orders can be lower than ``N`` after divisions.
    """
    identity = as_identity(identity)
    kind = FORMAL_IDENTITIES.get(identity)
    if kind is None:
        raise DomainError(f"{identity} has no formal check")
    if not isinstance(params, kind):
        raise TypeError(f"{identity} expects {kind.__name__}, got {type(params).__name__}")
    return _DISPATCH[kind](identity, params, N)


@dataclass
class FormalReport:
    identity: IdentityId
    params: object
    order: int
    passed: bool
    first_failing_order: int | None = None
    coefficient: Fraction | None = None
    working_order: int = 0
    notes: list[str] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "kind": "formal",
            "identity": self.identity.value,
            "params": self.params.to_record(),
            "order": self.order,
            "pass": self.passed,
            "status": "pass" if self.passed else "fail",
            "first_failing_order": self.first_failing_order,
            "coefficient": None if self.coefficient is None else str(self.coefficient),
            "working_order": self.working_order,
            "notes": list(self.notes),
        }


def formal_check(identity, params, N: int = 50, max_pad: int = 64) -> FormalReport:
    """Compare both sides coefficientwise through ``p^N``.

    Sources are computed a few orders beyond ``N``; if divisions still leave
    the difference known to fewer than ``N`` orders the padding is doubled.
    """
    identity = as_identity(identity)
    if N < 0:
        raise ValueError("N must be nonnegative")
    pad = 4
    while True:
        lhs, rhs = formal_sides(identity, params, N + pad)
        diff = lhs - rhs
        if diff.order is None or diff.order >= N:
            break
        if pad >= max_pad:
            raise PrecisionContractError(
                f"{identity}: difference known only through p^{diff.order} with padding {pad}")
        pad *= 2
    for k in range(diff.start, N + 1):
        c = diff.coeff(k)
        if c != 0:
            return FormalReport(identity, params, N, False, k, c, N + pad)
    return FormalReport(identity, params, N, True, working_order=N + pad)
