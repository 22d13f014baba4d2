"""Closed-form sides of the connection formulas.

Every function returns a :class:`TruncatedValue`.  Functions whose right-hand
side is a sum of several "idem" terms also have a ``*_terms`` variant returning
the individual summands, which the verification code uses as the residual
scale (the total may cancel).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any, Sequence

from .errors import (
    DomainError,
    OutsideConvergenceDomain,
    ResonantParameters,
    ThetaZero,
)
from .qcore import (
    QContext,
    SeriesSpec,
    TruncatedValue,
    phi_series,
    pochhammer_ratio,
    theta_scaled,
)
from .resummation import Psi1Params, SpiralSpec


def theta_ratio(top: Any, bottom: Any, ctx: QContext) -> Any:
    """``theta(top) / theta(bottom)`` without overflow; raises on a zero denominator."""
    if ctx.on_spiral(bottom, -1) is not None:
        raise ThetaZero(f"theta({bottom}) vanishes")
    return ctx.unscale(theta_scaled(top, ctx) / theta_scaled(bottom, ctx))


def _tv(terms: Sequence[Any], parts: Sequence[TruncatedValue], note: str = "") -> TruncatedValue:
    value = sum(terms[1:], terms[0])
    return TruncatedValue(
        value,
        terms_used_pos=max((p.terms_used_pos for p in parts), default=0),
        last_term_mag=max((p.last_term_mag for p in parts), default=0.0),
        converged=all(p.converged for p in parts),
        note=note,
    )


# --- Ramanujan --------------------------------------------------------------


def ramanujan_product(a: Any, b: Any, ctx: QContext, z: Any) -> TruncatedValue:
    """``(q, b/a, az, q/az; q)_inf / (b, q/a, z, b/az; q)_inf``, the sum of 1psi1(a; b; q, z)."""
    a, b, z = ctx.num(a), ctx.num(b), ctx.num(z)
    q = ctx.q
    if not abs(b / a) < abs(z) < 1:
        raise OutsideConvergenceDomain(f"need |b/a| < |z| < 1, got |z| = {float(abs(z))}")
    value = pochhammer_ratio([q, b / a, a * z, q / (a * z)], [b, q / a, z, b / (a * z)], ctx)
    return TruncatedValue(value)


def ramanujan_theta_form(a: Any, b: Any, ctx: QContext, z: Any) -> TruncatedValue:
    """Same sum written as a theta ratio times 1phi0(aq/b; -; q, b/(az)).

    The variant with 1phi0(a; -; q, q/(az)) only agrees when b = q.
    """
    a, b, z = ctx.num(a), ctx.num(b), ctx.num(z)
    q = ctx.q
    k = pochhammer_ratio([b / a, q], [b, q / a], ctx)
    series = phi_series(SeriesSpec.phi([a * q / b], []), ctx, b / (a * z))
    return _tv([k * theta_ratio(-a * z, -z, ctx) * series.value], [series])


# --- Watson -----------------------------------------------------------------


def y_infinity(a: Any, b: Any, c: Any, ctx: QContext, x: Any) -> TruncatedValue:
    """``theta(ax)/theta(x) * 2phi1(a, aq/c; aq/b; q, cq/(abx))``, a Heine solution at infinity."""
    a, b, c, x = (ctx.num(v) for v in (a, b, c, x))
    q = ctx.q
    series = phi_series(SeriesSpec.phi([a, a * q / c], [a * q / b]), ctx, c * q / (a * b * x))
    return _tv([theta_ratio(a * x, x, ctx) * series.value], [series])


def watson_terms(a: Any, b: Any, c: Any, ctx: QContext, x: Any) -> tuple[list[Any], list[TruncatedValue]]:
    a, b, c, x = (ctx.num(v) for v in (a, b, c, x))
    if ctx.on_spiral(a, b) is not None:
        raise ResonantParameters("a/b lies on q^Z")
    if not abs(c * ctx.q / (a * b * x)) < 1:
        raise OutsideConvergenceDomain("need |cq/(abx)| < 1")
    terms, parts = [], []
    for A, B in ((a, b), (b, a)):
        k = pochhammer_ratio([B, c / A], [c, B / A], ctx)
        # theta(-Ax)/theta(-x) * theta(x)/theta(Ax) * y_inf; the middle ratio
        # cancels the prefactor inside y_inf, so evaluate the series directly
        series = phi_series(
            SeriesSpec.phi([A, A * ctx.q / c], [A * ctx.q / B]), ctx, c * ctx.q / (A * B * x)
        )
        terms.append(k * theta_ratio(-A * x, -x, ctx) * series.value)
        parts.append(series)
    return terms, parts


def watson_rhs(a: Any, b: Any, c: Any, ctx: QContext, x: Any) -> TruncatedValue:
    """Right side of Watson's formula: 2phi1(a, b; c; q, x) in the basis at infinity."""
    return _tv(*watson_terms(a, b, c, ctx, x))


# --- Slater -----------------------------------------------------------------


@dataclass(frozen=True)
class SlaterParams:
    a: tuple
    b: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        if len(self.a) != len(self.b) or not self.a:
            raise ValueError("need r >= 1 numerator and r denominator parameters")

    @property
    def r(self) -> int:
        return len(self.a)

    def validate(self, ctx: QContext) -> None:
        a = [ctx.num(v) for v in self.a]
        if any(v == 0 for v in a):
            raise DomainError("Slater parameters a_i must be nonzero")
        for i in range(len(a)):
            for j in range(i + 1, len(a)):
                if ctx.on_spiral(a[i], a[j]) is not None:
                    raise ResonantParameters(f"a_{i + 1}/a_{j + 1} lies on q^Z")
        for bj in self.b:
            k = ctx.on_spiral(ctx.num(bj), 1)
            if k is not None and k <= 0:
                raise ResonantParameters(f"b = {bj} lies on q^(Z<=0)")


def _prod(values: Sequence[Any], ctx: QContext) -> Any:
    out = ctx.num(1)
    for v in values:
        out *= v
    return out


def slater_prefactor(params: SlaterParams, ctx: QContext, x: Any) -> Any:
    """``(b.., q/a.., x, q/x; q)_inf / (q a.., 1/a..; q)_inf`` multiplying rpsir."""
    q = ctx.q
    a = [ctx.num(v) for v in params.a]
    b = [ctx.num(v) for v in params.b]
    x = ctx.num(x)
    top = b + [q / ai for ai in a] + [x, q / x]
    bottom = [q * ai for ai in a] + [1 / ai for ai in a]
    return pochhammer_ratio(top, bottom, ctx)


def slater_terms(params: SlaterParams, ctx: QContext, x: Any) -> tuple[list[Any], list[TruncatedValue]]:
    params.validate(ctx)
    q = ctx.q
    a = [ctx.num(v) for v in params.a]
    b = [ctx.num(v) for v in params.b]
    x = ctx.num(x)
    r = params.r
    ratio = _prod(b, ctx) / (_prod(a, ctx) * x)
    if not abs(ratio) < 1 or not abs(x) < 1:
        raise OutsideConvergenceDomain("need |b1..br/(a1..ar)| < |x| < 1")
    terms, parts = [], []
    for k in range(r):
        ak = a[k]
        others = a[:k] + a[k + 1:]
        top = [q] + [q * ak / aj for aj in others] + [bj / ak for bj in b] + [ak * x, q / (ak * x)]
        bottom = [q * ak, 1 / ak] + [ak / aj for aj in others] + [q * aj / ak for aj in others]
        coef = ak ** (r - 1) * pochhammer_ratio(top, bottom, ctx)
        series = phi_series(
            SeriesSpec.phi([q * ak / bj for bj in b], [q * ak / aj for aj in others]), ctx, ratio
        )
        terms.append(coef * series.value)
        parts.append(series)
    return terms, parts


def slater_rhs(params: SlaterParams, ctx: QContext, x: Any) -> TruncatedValue:
    """The r-term idem sum equal to ``slater_prefactor * rpsir(a; b; q, x)``."""
    return _tv(*slater_terms(params, ctx, x))


# --- 2psi2 with a zero denominator parameter --------------------------------


def corollary_terms(params: Psi1Params, ctx: QContext, x: Any) -> tuple[list[Any], list[TruncatedValue]]:
    params.validate(ctx)
    a1, a2, b1 = params.nums(ctx)
    q = ctx.q
    x = ctx.num(x)
    if not 0 < abs(x) < 1:
        raise OutsideConvergenceDomain("need 0 < |x| < 1")
    terms, parts = [], []
    for A, B in ((a1, a2), (a2, a1)):
        k = pochhammer_ratio(
            [q * A, q * B, 1 / B, q * A / B, b1 / A, q],
            [b1, q / A, q / B, q * A, A / B, q * B / A],
            ctx,
        )
        series = phi_series(SeriesSpec.phi([q * A / b1], [q * A / B]), ctx, q * b1 / (B * x))
        terms.append(k * theta_ratio(-A * x / q, -x / q, ctx) * series.value)
        parts.append(series)
    return terms, parts


def corollary_2psi2_rhs(params: Psi1Params, ctx: QContext, x: Any) -> TruncatedValue:
    """Two-term 1phi1 expression for 2psi2(a1, a2; b1, 0; q, x), 0 < |x| < 1."""
    return _tv(*corollary_terms(params, ctx, x))


# --- solutions at infinity and connection coefficients -----------------------


def v_solution(params: Psi1Params, ctx: QContext, which: int, x: Any) -> TruncatedValue:
    """``v_i(x) = theta(a_i x)/theta(x) * 2phi1(q a_i/b1, 0; q a_i/a_j; q, b1/(a1 a2 x))``."""
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    params.validate(ctx)
    a1, a2, b1 = params.nums(ctx)
    q = ctx.q
    x = ctx.num(x)
    A, B = (a1, a2) if which == 1 else (a2, a1)
    arg = b1 / (a1 * a2 * x)
    if not abs(arg) < 1:
        raise OutsideConvergenceDomain(f"need |b1/(a1 a2 x)| < 1, got {float(abs(arg))}")
    series = phi_series(SeriesSpec.phi([q * A / b1, 0], [q * A / B]), ctx, arg)
    return _tv([theta_ratio(A * x, x, ctx) * series.value], [series])


class Coefficient(enum.Enum):
    C1 = 1
    C2 = 2


@dataclass(frozen=True)
class ConnectionCoefficientSpec:
    params: Psi1Params
    spiral: SpiralSpec
    which: Coefficient = Coefficient.C1

    def __post_init__(self) -> None:
        object.__setattr__(self, "which", Coefficient(self.which))
        ctx = self.spiral.ctx
        self.params.validate(ctx)
        a1, a2, _ = self.params.nums(ctx)
        q = ctx.q
        for v in (q / a1, q / a2, q * a1 / a2, q * a2 / a1):
            k = ctx.on_spiral(v, 1)
            if k is not None and k <= 0:
                raise ResonantParameters(f"{v} lies on q^(Z<=0); an infinite Pochhammer vanishes")


def connection_coefficient(spec: ConnectionCoefficientSpec, x: Any) -> TruncatedValue:
    """q-elliptic coefficient C1 or C2 of the resummed 2psi1 in the (v1, v2) basis."""
    ctx = spec.spiral.ctx
    lam = spec.spiral.lam
    a1, a2, b1 = spec.params.nums(ctx)
    q = ctx.q
    x = ctx.num(x)
    A, B = (a1, a2) if spec.which is Coefficient.C1 else (a2, a1)
    # constant of the Borel image's A-term; (qA;q)_inf cancels top and bottom
    # but (qB;q)_inf / (q/B;q)_inf does not
    k = pochhammer_ratio(
        [q * B, 1 / B, q * A / B, b1 / A, q], [b1, q / A, q / B, A / B, q * B / A], ctx
    )
    value = (
        k
        * theta_ratio(A * lam / q, lam / q, ctx)
        * theta_ratio(A * q * x / lam, q * x / lam, ctx)
        * theta_ratio(x, A * x, ctx)
    )
    return TruncatedValue(value)


def main_theorem_terms(params: Psi1Params, spiral: SpiralSpec, x: Any) -> tuple[list[Any], list[TruncatedValue]]:
    terms, parts = [], []
    for which in (1, 2):
        c = connection_coefficient(ConnectionCoefficientSpec(params, spiral, which), x)
        v = v_solution(params, spiral.ctx, which, x)
        terms.append(c.value * v.value)
        parts.extend([c, v])
    return terms, parts


def main_theorem_rhs(params: Psi1Params, spiral: SpiralSpec, x: Any) -> TruncatedValue:
    """``C1(x) v1(x) + C2(x) v2(x)``."""
    return _tv(*main_theorem_terms(params, spiral, x))
