"""q-Pochhammer symbols, Jacobi theta and basic hypergeometric series.

All sums are evaluated by term-ratio recurrences with a binary exponent
carried alongside the running partial sum, so theta-type magnitudes far outside the
float64 exponent range (e.g. ``theta(1e-40)``) are handled without overflow.
The scaled results are exposed as :class:`Scaled` for callers (the
resummation code) that only ever need ratios of such quantities.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, NamedTuple, Sequence

import mpmath

from .errors import (
    ConfigError,
    DivergentAtOrigin,
    DivergentSeries,
    DivisionByVanishingFactor,
    DomainError,
    MaxTermsExceeded,
    OutsideConvergenceDomain,
    ZeroArgument,
)

__all__ = [
    "QContext",
    "TruncatedValue",
    "Scaled",
    "SeriesKind",
    "SeriesSpec",
    "qpochhammer",
    "qpochhammer_inf",
    "qpochhammer_multi",
    "theta",
    "theta_scaled",
    "phi_series",
    "psi_series",
    "psi_series_scaled",
]

# Rescale threshold for running sums; a power of two keeps the rescale exact.
_BIG_EXP = 500
_BIG = 2.0**_BIG_EXP
_LN2 = math.log(2.0)
# Number of consecutive sub-threshold terms before a one-sided sum stops.
_QUIET_RUN = 3


@dataclass(frozen=True)
class QContext:
    """Base ``q`` plus the numerical policy used by every evaluation.

    ``precision_bits == 53`` computes with Python ``complex``; anything larger
    switches to an mpmath context of that many mantissa bits.
    """

    q: Any
    precision_bits: int = 53
    eps: float | None = None
    max_terms: int = 4096
    _mp: Any = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.precision_bits < 53:
            raise ConfigError("precision_bits must be >= 53")
        if self.max_terms < 8:
            raise ConfigError("max_terms must be >= 8")
        if self.precision_bits > 53:
            mp = mpmath.MPContext()
            mp.prec = self.precision_bits
            object.__setattr__(self, "_mp", mp)
        q = self.num(self.q)
        if not 0 < abs(q) < 1:
            raise ConfigError(f"need 0 < |q| < 1, got |q| = {float(abs(q))!r}")
        object.__setattr__(self, "q", q)
        if self.eps is None:
            object.__setattr__(self, "eps", 2.0 ** (-self.precision_bits))
        elif not self.eps > 0:
            raise ConfigError("eps must be positive")

    @property
    def extended(self) -> bool:
        return self._mp is not None

    @property
    def machine_eps(self) -> float:
        return 2.0 ** (1 - self.precision_bits)

    @property
    def resonance_tol(self) -> float:
        """Magnitude below which a factor counts as vanishing."""
        return 1e3 * self.machine_eps

    def with_q(self, q: Any) -> "QContext":
        return QContext(q, self.precision_bits, self.eps, self.max_terms)

    def num(self, x: Any) -> Any:
        if self._mp is not None:
            return self._mp.mpc(x)
        return complex(x)

    def exp(self, x: Any) -> Any:
        if self._mp is not None:
            return self._mp.exp(x)
        return cmath.exp(x)

    def log(self, x: Any) -> Any:
        if self._mp is not None:
            return self._mp.log(x)
        return cmath.log(x)

    def expf(self, x: float) -> Any:
        """Real exponential that saturates instead of raising."""
        if self._mp is not None:
            return self._mp.exp(x)
        if x > 709.0:
            return math.inf
        return math.exp(x)

    def pi(self) -> Any:
        return self._mp.pi if self._mp is not None else math.pi

    def ldexp(self, x: Any, e: int) -> Any:
        """Exact ``x * 2**e``; machine floats saturate to inf or flush to 0."""
        if self._mp is not None:
            return x * self._mp.ldexp(self._mp.mpf(1), e)
        z = complex(x)
        return complex(_ldexp(z.real, e), _ldexp(z.imag, e))

    def unscale(self, s: "Scaled") -> Any:
        return self.ldexp(s.mant, s.exp2)

    def close_to(self, a: Any, b: Any) -> bool:
        """True when ``a`` and ``b`` agree to resonance tolerance."""
        return abs(a - b) < self.resonance_tol * max(1.0, abs(a), abs(b))

    def on_spiral(self, x: Any, base: Any, window: int = 200) -> int | None:
        """Return k with ``x == base*q^k`` (within tolerance), else None."""
        if x == 0 or base == 0:
            return None
        # |x/base| = |q|^k fixes the candidate k; the phase check decides
        ratio = x / base
        k = round(math.log(float(abs(ratio))) / math.log(float(abs(self.q))))
        if abs(k) > window:
            return None
        return k if self.close_to(ratio, self.q**k) else None


def _ldexp(x: float, e: int) -> float:
    try:
        return math.ldexp(x, e)
    except OverflowError:
        return math.copysign(math.inf, x)


class Scaled(NamedTuple):
    """A value stored as ``mant * 2**exp2``; the integer exponent keeps rescaling exact."""

    mant: Any
    exp2: int = 0

    @property
    def log(self) -> float:
        """Natural log of the scale factor."""
        return self.exp2 * _LN2

    def __mul__(self, other: "Scaled") -> "Scaled":  # type: ignore[override]
        return Scaled(self.mant * other.mant, self.exp2 + other.exp2)

    def __truediv__(self, other: "Scaled") -> "Scaled":
        return Scaled(self.mant / other.mant, self.exp2 - other.exp2)

    def scale_by(self, c: Any) -> "Scaled":
        return Scaled(self.mant * c, self.exp2)

    def normalized(self, ctx: QContext) -> "Scaled":
        """Move the binary magnitude of ``mant`` into ``exp2``."""
        m = abs(self.mant)
        if m == 0:
            return self
        if ctx.extended:
            e = int(ctx._mp.floor(ctx._mp.log(m, 2)))
        else:
            if not math.isfinite(m):
                return self
            e = math.frexp(m)[1] - 1
        return Scaled(ctx.ldexp(self.mant, -e), self.exp2 + e)


def scaled_add(a: Scaled, b: Scaled, ctx: QContext) -> Scaled:
    if a.mant == 0:
        return b
    if b.mant == 0:
        return a
    top = max(a.exp2, b.exp2)
    return Scaled(ctx.ldexp(a.mant, a.exp2 - top) + ctx.ldexp(b.mant, b.exp2 - top), top)


@dataclass(frozen=True)
class TruncatedValue:
    """A computed value plus the truncation report of the sum behind it."""

    value: Any
    terms_used_pos: int = 0
    terms_used_neg: int = 0
    last_term_mag: float = 0.0
    converged: bool = True
    note: str = ""

    def __complex__(self) -> complex:
        return complex(self.value)


class SeriesKind(enum.Enum):
    UNILATERAL_PHI = "unilateral_phi"
    BILATERAL_PSI = "bilateral_psi"


@dataclass(frozen=True)
class SeriesSpec:
    numerator: tuple = ()
    denominator: tuple = ()
    kind: SeriesKind = SeriesKind.UNILATERAL_PHI

    def __post_init__(self) -> None:
        object.__setattr__(self, "numerator", tuple(self.numerator))
        object.__setattr__(self, "denominator", tuple(self.denominator))
        object.__setattr__(self, "kind", SeriesKind(self.kind))

    @classmethod
    def phi(cls, numerator: Iterable = (), denominator: Iterable = ()) -> "SeriesSpec":
        return cls(tuple(numerator), tuple(denominator), SeriesKind.UNILATERAL_PHI)

    @classmethod
    def psi(cls, numerator: Iterable = (), denominator: Iterable = ()) -> "SeriesSpec":
        return cls(tuple(numerator), tuple(denominator), SeriesKind.BILATERAL_PSI)

    @property
    def r(self) -> int:
        return len(self.numerator)

    @property
    def s(self) -> int:
        return len(self.denominator)

    def validate(self, ctx: QContext) -> None:
        """Reject denominator parameters on the pole set of the series."""
        for b in self.denominator:
            b = ctx.num(b)
            k = ctx.on_spiral(b, 1)
            if k is not None and k <= 0:
                raise DivisionByVanishingFactor(
                    f"denominator parameter {b} equals q^{k}; (b;q)_n vanishes"
                )
        if self.kind is SeriesKind.BILATERAL_PSI:
            for a in self.numerator:
                a = ctx.num(a)
                if a == 0:
                    raise DomainError("bilateral series needs nonzero numerator parameters")
                k = ctx.on_spiral(a, 1)
                if k is not None and k >= 1:
                    raise DivisionByVanishingFactor(
                        f"numerator parameter {a} equals q^{k}; (a;q)_n has a pole for n < 0"
                    )


# --- q-shifted factorials ---------------------------------------------------


def qpochhammer(a: Any, ctx: QContext, n: int) -> Any:
    """Finite q-shifted factorial ``(a;q)_n`` for any integer ``n``."""
    a = ctx.num(a)
    q = ctx.q
    p = ctx.num(1)
    if n >= 0:
        qk = ctx.num(1)
        for _ in range(n):
            p *= 1 - a * qk
            qk *= q
        return p
    qinv = 1 / q
    qk = qinv
    tol = ctx.resonance_tol
    for k in range(1, -n + 1):
        f = 1 - a * qk
        if abs(f) < tol:
            raise DivisionByVanishingFactor(f"1 - a q^-{k} vanishes for a = {a}")
        p *= f
        qk *= qinv
    return 1 / p


def qpochhammer_inf(a: Any, ctx: QContext) -> TruncatedValue:
    """``(a;q)_inf`` by partial products with a multiplicative tail bound.

    After ``K`` factors the remaining product differs from 1 by at most
    ``exp(t) - 1`` with ``t = |a q^K| / (1 - |q|)``; we stop once that is
    below ``eps``.
    """
    a = ctx.num(a)
    q = ctx.q
    eps = ctx.eps
    shrink = 1.0 - float(abs(q))
    p = ctx.num(1)
    term = a
    k = 0
    while abs(term) / shrink > eps:
        if k >= ctx.max_terms:
            raise MaxTermsExceeded(
                f"(a;q)_inf for a={a}: tail bound not met after {k} factors",
                side="pos", terms=k,
            )
        p *= 1 - term
        term *= q
        k += 1
    tail = float(abs(term)) / shrink
    return TruncatedValue(p, terms_used_pos=k, last_term_mag=tail, converged=True)


def qpochhammer_multi(params: Sequence[Any], ctx: QContext) -> TruncatedValue:
    value = ctx.num(1)
    used = 0
    last = 0.0
    converged = True
    for a in params:
        tv = qpochhammer_inf(a, ctx)
        value *= tv.value
        used = max(used, tv.terms_used_pos)
        last = max(last, tv.last_term_mag)
        converged = converged and tv.converged
    return TruncatedValue(value, terms_used_pos=used, last_term_mag=last, converged=converged)


def pochhammer_ratio(top: Sequence[Any], bottom: Sequence[Any], ctx: QContext) -> Any:
    """``(top;q)_inf / (bottom;q)_inf``; raises on a vanishing denominator."""
    from .errors import PoleInProduct

    den = ctx.num(1)
    for b in bottom:
        v = qpochhammer_inf(b, ctx).value
        if abs(v) < ctx.resonance_tol:
            raise PoleInProduct(f"({b};q)_inf vanishes in a denominator")
        den *= v
    return qpochhammer_multi(top, ctx).value / den


# --- one-sided summation core -----------------------------------------------


class _Side(NamedTuple):
    total: Scaled
    terms: int
    last: float  # unscaled magnitude of the last term (may be inf/0 only in extremes)
    stopped: bool


def _sum_side(
    ratio: Callable[[int], Any],
    ctx: QContext,
    *,
    include_first: bool,
    side: str,
    limit: int | None = None,
    raise_on_cap: bool = True,
) -> _Side:
    """Sum ``t_0 + t_1 + ...`` with ``t_0 = 1`` and ``t_{k+1} = t_k * ratio(k)``.

    Stops after ``_QUIET_RUN`` consecutive terms with
    ``|t| <= eps * max(|partial|, 1)``.  With ``include_first=False`` the
    leading 1 is skipped (used for the negative half of bilateral sums).
    """
    limit = ctx.max_terms if limit is None else limit
    eps = ctx.eps
    t = ctx.num(1)
    s = t if include_first else ctx.num(0)
    e2 = 0
    quiet = 0
    k = 0
    while k < limit:
        r = ratio(k)
        # rescale first when the product itself would overflow
        while abs(t) * abs(r) > _BIG and abs(t) > 1:
            t /= _BIG
            s /= _BIG
            e2 += _BIG_EXP
        t = t * r
        k += 1
        s += t
        at = abs(t)
        if at > _BIG:
            t /= _BIG
            s /= _BIG
            e2 += _BIG_EXP
            at = abs(t)
        floor = _ldexp(1.0, -e2)
        if at <= eps * max(abs(s), floor):
            quiet += 1
            if quiet >= _QUIET_RUN:
                return _Side(Scaled(s, e2), k + include_first, _ldexp(float(at), e2), True)
        else:
            quiet = 0
    if raise_on_cap:
        raise MaxTermsExceeded(
            f"{side} side did not meet the stopping rule within {limit} terms",
            side=side, terms=k,
        )
    return _Side(Scaled(s, e2), k + include_first, _ldexp(float(abs(t)), e2), False)


def _finish(total: Scaled, ctx: QContext, pos: _Side, neg: _Side | None = None, note: str = "") -> TruncatedValue:
    value = ctx.unscale(total)
    last = max(pos.last, neg.last if neg else 0.0)
    stopped = pos.stopped and (neg.stopped if neg else True)
    converged = stopped and last <= ctx.eps * max(float(abs(value)), 1.0)
    return TruncatedValue(
        value,
        terms_used_pos=pos.terms,
        terms_used_neg=neg.terms if neg else 0,
        last_term_mag=last,
        converged=converged,
        note=note,
    )


# --- theta ------------------------------------------------------------------


def _theta_sides(x: Any, ctx: QContext) -> tuple[_Side, _Side]:
    q = ctx.q
    # t_n = q^{n(n-1)/2} x^n ; t_{n+1}/t_n = q^n x ; t_{-m-1}/t_{-m} = q^{m+1}/x
    qp = [ctx.num(1)]

    def up(k: int) -> Any:
        # ratio t_{k+1}/t_k = q^k x
        while len(qp) <= k + 1:
            qp.append(qp[-1] * q)
        return qp[k] * x

    def down(k: int) -> Any:
        while len(qp) <= k + 1:
            qp.append(qp[-1] * q)
        return qp[k + 1] / x

    pos = _sum_side(up, ctx, include_first=True, side="pos")
    neg = _sum_side(down, ctx, include_first=False, side="neg")
    return pos, neg


def theta_scaled(x: Any, ctx: QContext) -> Scaled:
    """``theta_q(x)`` as a :class:`Scaled` value (no overflow)."""
    x = ctx.num(x)
    if x == 0:
        raise ZeroArgument("theta is undefined at x = 0")
    pos, neg = _theta_sides(x, ctx)
    return scaled_add(pos.total, neg.total, ctx)


def theta(x: Any, ctx: QContext) -> TruncatedValue:
    """Jacobi theta ``sum_n q^{n(n-1)/2} x^n`` by direct bilateral summation."""
    x = ctx.num(x)
    if x == 0:
        raise ZeroArgument("theta is undefined at x = 0")
    pos, neg = _theta_sides(x, ctx)
    return _finish(scaled_add(pos.total, neg.total, ctx), ctx, pos, neg)


# --- basic hypergeometric series --------------------------------------------


def _check_factor(f: Any, ctx: QContext, what: str) -> Any:
    if abs(f) < ctx.resonance_tol:
        raise DivisionByVanishingFactor(f"vanishing factor in {what}")
    return f


def phi_series(spec: SeriesSpec, ctx: QContext, x: Any) -> TruncatedValue:
    """Unilateral ``r phi s(a; b; q, x)`` with the ``{(-1)^n q^{n(n-1)/2}}^{1+s-r}`` factor."""
    if spec.kind is not SeriesKind.UNILATERAL_PHI:
        raise ValueError("phi_series needs a unilateral_phi SeriesSpec")
    x = ctx.num(x)
    r, s = spec.r, spec.s
    if r - s > 1:
        raise DivergentSeries(f"{r}phi{s} has zero radius of convergence")
    if r - s == 1 and abs(x) >= 1:
        raise OutsideConvergenceDomain(f"{r}phi{s} needs |x| < 1, got |x| = {float(abs(x))}")
    spec.validate(ctx)
    a = [ctx.num(v) for v in spec.numerator]
    b = [ctx.num(v) for v in spec.denominator]
    q = ctx.q
    power = 1 + s - r
    state = {"qn": ctx.num(1)}

    def ratio(n: int) -> Any:
        qn = state["qn"]
        num = x
        for ai in a:
            num *= 1 - ai * qn
        den = _check_factor(1 - qn * q, ctx, "(q;q)_n")
        for bj in b:
            den *= _check_factor(1 - bj * qn, ctx, "denominator Pochhammer")
        if power:
            num *= (-qn) ** power
        state["qn"] = qn * q
        return num / den

    side = _sum_side(ratio, ctx, include_first=True, side="pos")
    return _finish(side.total, ctx, side)


def _psi_domain(spec: SeriesSpec, ctx: QContext, x: Any) -> None:
    r, s = spec.r, spec.s
    if s < r:
        raise DivergentAtOrigin(
            f"{r}psi{s} with s < r diverges around the origin; use the q-Borel-Laplace resummation"
        )
    num = ctx.num(1)
    for ai in spec.numerator:
        num *= ctx.num(ai)
    den = ctx.num(1)
    for bj in spec.denominator:
        den *= ctx.num(bj)
    radius = abs(den / num) if num != 0 else math.inf
    ax = abs(x)
    if ax <= radius:
        raise OutsideConvergenceDomain(f"{r}psi{s} needs |x| > {float(radius)}, got {float(ax)}")
    if r == s and ax >= 1:
        raise OutsideConvergenceDomain(f"{r}psi{s} needs |x| < 1, got {float(ax)}")


def _psi_sides(spec: SeriesSpec, ctx: QContext, x: Any) -> tuple[_Side, _Side]:
    a = [ctx.num(v) for v in spec.numerator]
    b = [ctx.num(v) for v in spec.denominator]
    q = ctx.q
    power = spec.s - spec.r
    up_state = {"qn": ctx.num(1)}

    def up(n: int) -> Any:
        # t_{n+1}/t_n = prod(1 - a q^n)/prod(1 - b q^n) * (-q^n)^{s-r} * x
        qn = up_state["qn"]
        num = x
        for ai in a:
            num *= 1 - ai * qn
        den = ctx.num(1)
        for bj in b:
            den *= _check_factor(1 - bj * qn, ctx, "denominator Pochhammer")
        if power:
            num *= (-qn) ** power
        up_state["qn"] = qn * q
        return num / den

    qinv = 1 / q
    down_state = {"qm": qinv}

    def down(m: int) -> Any:
        # step n -> n-1 with n = -m: t_{n-1}/t_n = prod(1 - b q^{n-1})/prod(1 - a q^{n-1}) * (-q^{1-n})^{s-r} / x
        qm = down_state["qm"]  # q^{n-1} = q^{-(m+1)}
        num = ctx.num(1)
        for bj in b:
            num *= 1 - bj * qm
        den = x
        for ai in a:
            den *= _check_factor(1 - ai * qm, ctx, "numerator Pochhammer (negative index)")
        if power:
            num *= (-1 / qm) ** power
        down_state["qm"] = qm * qinv
        return num / den

    pos = _sum_side(up, ctx, include_first=True, side="pos")
    neg = _sum_side(down, ctx, include_first=False, side="neg")
    return pos, neg


def psi_series_scaled(spec: SeriesSpec, ctx: QContext, x: Any) -> tuple[Scaled, _Side, _Side]:
    if spec.kind is not SeriesKind.BILATERAL_PSI:
        raise ValueError("psi_series needs a bilateral_psi SeriesSpec")
    x = ctx.num(x)
    spec.validate(ctx)
    _psi_domain(spec, ctx, x)
    pos, neg = _psi_sides(spec, ctx, x)
    return scaled_add(pos.total, neg.total, ctx), pos, neg


def psi_series(spec: SeriesSpec, ctx: QContext, x: Any) -> TruncatedValue:
    """Bilateral ``r psi s(a; b; q, x)`` on its annulus of convergence."""
    total, pos, neg = psi_series_scaled(spec, ctx, x)
    return _finish(total, ctx, pos, neg)
