"""q-Borel / q-Laplace transforms on bilateral series.

The Borel transform reweights coefficients by ``q^{n(n-1)/2}``; the Laplace
transform is the Jackson sum ``sum_n psi(lam q^n) / theta(lam q^n / x)`` over
the spiral ``lam q^Z``.  Composed on the divergent series

    2psi1(a1, a2; b1; q, x) = sum_n (a1, a2; q)_n / (b1; q)_n * (-1)^n q^{-n(n-1)/2} x^n

they give an analytic function that solves the same q-difference equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

from .errors import (
    ConfigError,
    DomainError,
    MaxTermsExceeded,
    ResonantParameters,
    SpiralCollision,
    ThetaPole,
)
from .qcore import (
    QContext,
    Scaled,
    SeriesSpec,
    TruncatedValue,
    phi_series,
    pochhammer_ratio,
    psi_series,
    psi_series_scaled,
    qpochhammer,
    scaled_add,
    theta_scaled,
)

# Inside this radius the Borel image is summed as a bilateral series; outside
# it the two-term continuation is used.  The public default follows the
# series' own annulus; the Laplace sum uses a smaller radius so the direct
# branch never sits in its slowly converging rim.
DIRECT_RADIUS = 1.0
LAPLACE_DIRECT_RADIUS = 0.5
DEFAULT_WINDOW = 64


@dataclass(frozen=True)
class SpiralSpec:
    """The spiral ``lam * q^Z`` carrying the Jackson sum.

    ``window`` caps the number of spiral points summed on each side; by
    default it grows with the working precision.
    """

    lam: Any
    ctx: QContext
    window: int | None = None

    def __post_init__(self) -> None:
        if self.window is None:
            object.__setattr__(self, "window", max(DEFAULT_WINDOW, self.ctx.precision_bits))
        lam = self.ctx.num(self.lam)
        if lam == 0:
            raise DomainError("lambda must be nonzero")
        if self.ctx.on_spiral(lam, 1) is not None:
            raise ResonantParameters(f"lambda = {lam} lies on q^Z")
        if self.window < 8:
            raise ConfigError("window must be >= 8")
        object.__setattr__(self, "lam", lam)

    def shifted(self, k: int = 1) -> "SpiralSpec":
        """Same spiral, representative ``lam * q^k``."""
        return SpiralSpec(self.lam * self.ctx.q**k, self.ctx, self.window)


@dataclass(frozen=True)
class BilateralCoefficients:
    """A coefficient sequence ``n -> a_n`` on Z.

    ``lower``/``upper`` bound the support when known (``None`` = unbounded);
    ``evaluate`` optionally gives the sum function directly, which the
    roundtrip check uses as its reference.
    """

    coeff: Callable[[int], Any]
    description: str = ""
    lower: int | None = None
    upper: int | None = None
    evaluate: Callable[[Any], Any] | None = None

    def __call__(self, n: int) -> Any:
        if self.lower is not None and n < self.lower:
            return 0
        if self.upper is not None and n > self.upper:
            return 0
        return self.coeff(n)


@dataclass(frozen=True)
class Psi1Params:
    a1: Any
    a2: Any
    b1: Any

    def validate(self, ctx: QContext) -> None:
        a1, a2, b1 = (ctx.num(v) for v in (self.a1, self.a2, self.b1))
        if a1 == 0 or a2 == 0:
            raise DomainError("a1 and a2 must be nonzero")
        k = ctx.on_spiral(b1, 1)
        if k is not None and k <= 0:
            raise ResonantParameters(f"b1 = {b1} lies on q^(Z<=0)")
        if ctx.on_spiral(a1, a2) is not None:
            raise ResonantParameters("a1/a2 lies on q^Z")

    def nums(self, ctx: QContext) -> tuple[Any, Any, Any]:
        return ctx.num(self.a1), ctx.num(self.a2), ctx.num(self.b1)

    def swapped(self) -> "Psi1Params":
        return Psi1Params(self.a2, self.a1, self.b1)


# --- Borel ------------------------------------------------------------------


def q_borel_plus(f: BilateralCoefficients, ctx: QContext) -> BilateralCoefficients:
    """Coefficientwise ``a_n -> a_n q^{n(n-1)/2}``."""
    q = ctx.q

    def coeff(n: int) -> Any:
        return f(n) * q ** (n * (n - 1) // 2)

    return BilateralCoefficients(
        coeff, f"B+[{f.description}]", lower=f.lower, upper=f.upper
    )


def psi2x1_coefficients(params: Psi1Params, ctx: QContext) -> BilateralCoefficients:
    """Coefficients of the divergent ``2psi1(a1, a2; b1; q, x)``."""
    a1, a2, b1 = params.nums(ctx)
    q = ctx.q

    def coeff(n: int) -> Any:
        c = qpochhammer(a1, ctx, n) * qpochhammer(a2, ctx, n) / qpochhammer(b1, ctx, n)
        return c * (-1) ** n / q ** (n * (n - 1) // 2)

    return BilateralCoefficients(coeff, f"2psi1({a1},{a2};{b1})")


def evaluate_coefficients(f: BilateralCoefficients, ctx: QContext, z: Any, *, min_terms: int = 8) -> Scaled:
    """``sum_n f(n) z^n`` in scaled form.

    Finite support bounds are summed exactly; unbounded directions use the
    three-quiet-terms rule once ``min_terms`` terms have been seen.
    """
    z = ctx.num(z)
    if z == 0:
        raise DomainError("z must be nonzero")
    eps = ctx.eps
    total = Scaled(ctx.num(0), 0)

    def power(n: int) -> Scaled:
        p = Scaled(ctx.num(1), 0)
        step = z if n >= 0 else 1 / z
        for _ in range(abs(n)):
            p = p.scale_by(step).normalized(ctx)
        return p

    def run(start: int, step: int, stop: int | None) -> int:
        nonlocal total
        quiet = 0
        n = start
        count = 0
        zn = power(start)
        mult = z if step > 0 else 1 / z
        while True:
            if stop is not None and (n - stop) * step > 0:
                return count
            if count >= ctx.max_terms:
                raise MaxTermsExceeded(f"coefficient sum ({'pos' if step > 0 else 'neg'})", side="pos" if step > 0 else "neg", terms=count)
            term = zn.scale_by(f(n))
            total = scaled_add(total, term, ctx)
            count += 1
            if stop is None and count >= min_terms:
                tmag = abs(ctx.ldexp(term.mant, term.exp2 - total.exp2)) if term.mant != 0 else 0.0
                floor = ctx.ldexp(1.0, -total.exp2)
                if tmag <= eps * max(abs(total.mant), abs(floor)):
                    quiet += 1
                    if quiet >= 3:
                        return count
                else:
                    quiet = 0
            n += step
            zn = zn.scale_by(mult).normalized(ctx)

    lo = f.lower
    hi = f.upper
    if hi is None or hi >= 0:
        run(max(0, lo) if lo is not None else 0, 1, hi)
    if lo is None or lo < 0:
        run(min(-1, hi) if hi is not None else -1, -1, lo)
    return total


# --- Borel image of 2psi1 ---------------------------------------------------


def _continuation_scaled(params: Psi1Params, ctx: QContext, xi: Any) -> Scaled:
    a1, a2, b1 = params.nums(ctx)
    q = ctx.q
    if ctx.on_spiral(xi, -1) is not None:
        raise ThetaPole(f"xi = {xi} lies on -q^Z where theta(xi/q) vanishes")
    den_theta = theta_scaled(xi / q, ctx)
    total = Scaled(ctx.num(0), 0)
    for A, B in ((a1, a2), (a2, a1)):
        k = pochhammer_ratio(
            [q * A, q * B, 1 / B, q * A / B, b1 / A, q],
            [b1, q / A, q / B, q * A, A / B, q * B / A],
            ctx,
        )
        series = phi_series(SeriesSpec.phi([q * A / b1], [q * A / B]), ctx, -q * b1 / (B * xi))
        term = (theta_scaled(A * xi / q, ctx) / den_theta).scale_by(k * series.value)
        total = scaled_add(total, term, ctx)
    return total


def borel_image_scaled(params: Psi1Params, ctx: QContext, xi: Any, *, branch: str = "auto",
                       direct_radius: float = DIRECT_RADIUS) -> Scaled:
    xi = ctx.num(xi)
    if xi == 0:
        raise DomainError("xi must be nonzero")
    if branch == "auto":
        branch = "direct" if abs(xi) < direct_radius else "continuation"
    if branch == "direct":
        a1, a2, b1 = params.nums(ctx)
        total, _, _ = psi_series_scaled(SeriesSpec.psi([a1, a2], [b1, 0]), ctx, -xi)
        return total
    if branch == "continuation":
        return _continuation_scaled(params, ctx, xi)
    raise ValueError(f"unknown branch {branch!r}")


def borel_image_2psi2(params: Psi1Params, ctx: QContext, xi: Any, *, branch: str = "auto") -> TruncatedValue:
    """``(B+ 2psi1)(xi) = 2psi2(a1, a2; b1, 0; q, -xi)``.

    ``branch="direct"`` sums the bilateral series (needs ``|xi| < 1``);
    ``"continuation"`` uses the two-term 1phi1 expression valid off ``-q^Z``;
    ``"auto"`` picks direct inside the unit disk.
    """
    params.validate(ctx)
    xi = ctx.num(xi)
    if branch == "auto":
        branch = "direct" if abs(xi) < DIRECT_RADIUS else "continuation"
    if branch == "direct":
        a1, a2, b1 = params.nums(ctx)
        return psi_series(SeriesSpec.psi([a1, a2], [b1, 0]), ctx, -xi)
    value = ctx.unscale(borel_image_scaled(params, ctx, xi, branch=branch))
    return TruncatedValue(value, note="continuation")


# --- Laplace ----------------------------------------------------------------


def _as_scaled(v: Any, ctx: QContext) -> Scaled:
    if isinstance(v, Scaled):
        return v
    if isinstance(v, TruncatedValue):
        return Scaled(ctx.num(v.value), 0)
    return Scaled(ctx.num(v), 0)


def q_laplace_plus(psi_on_spiral: Callable[[Any], Any], spiral: SpiralSpec, x: Any) -> TruncatedValue:
    """Jackson sum ``sum_n psi(lam q^n) / theta(lam q^n / x)``.

    ``psi_on_spiral`` may return a plain number, a :class:`TruncatedValue`
    or a :class:`Scaled`.  Each side runs until three consecutive terms are
    below ``eps * max(|partial|, 1)`` or ``spiral.window`` terms are used;
    in the latter case ``converged`` is False and ``note`` names the side.
    """
    ctx = spiral.ctx
    x = ctx.num(x)
    if x == 0:
        raise DomainError("x must be nonzero")
    lam = spiral.lam
    if ctx.on_spiral(lam / x, -1) is not None:
        raise SpiralCollision(f"x = {x} lies on -lambda q^Z")
    q = ctx.q
    eps = ctx.eps
    total = ctx.num(0)

    def term(n: int) -> Any:
        xi = lam * q**n
        t = _as_scaled(psi_on_spiral(xi), ctx) / theta_scaled(xi / x, ctx)
        v = ctx.unscale(t)
        if not math.isfinite(abs(complex(v))):
            raise ArithmeticError(f"non-finite Laplace term at n = {n}")
        return v

    sides = {}
    for name, start, step in (("pos", 0, 1), ("neg", -1, -1)):
        quiet = 0
        count = 0
        n = start
        last = math.inf
        partial = ctx.num(0)
        stopped = False
        while count < spiral.window:
            t = term(n)
            partial += t
            count += 1
            last = float(abs(t))
            if last <= eps * max(float(abs(total + partial)), 1.0):
                quiet += 1
                if quiet >= 3:
                    stopped = True
                    break
            else:
                quiet = 0
            n += step
        total += partial
        sides[name] = (count, last, stopped)

    failed = [name for name, (_, _, ok) in sides.items() if not ok]
    note = ""
    if failed:
        note = "no decay within window on side(s): " + ",".join(failed)
    last = max(sides["pos"][1], sides["neg"][1])
    return TruncatedValue(
        total,
        terms_used_pos=sides["pos"][0],
        terms_used_neg=sides["neg"][0],
        last_term_mag=last,
        converged=not failed and last <= eps * max(float(abs(total)), 1.0),
        note=note,
    )


def resum_2psi1(params: Psi1Params, spiral: SpiralSpec, x: Any) -> TruncatedValue:
    """``L+_{q,lam}(B+ 2psi1)(x)`` summed numerically along the spiral."""
    ctx = spiral.ctx
    params.validate(ctx)

    def psi(xi: Any) -> Scaled:
        return borel_image_scaled(params, ctx, xi, direct_radius=LAPLACE_DIRECT_RADIUS)

    out = q_laplace_plus(psi, spiral, x)
    if out.note:
        side = out.note.rsplit(":", 1)[-1].strip()
        raise MaxTermsExceeded(
            f"Laplace sum at x = {x}: {out.note} (window {spiral.window})",
            side=side,
            terms=max(out.terms_used_pos, out.terms_used_neg),
        )
    return out


def roundtrip_check(f: BilateralCoefficients, spiral: SpiralSpec, x: Any) -> float:
    """``|L+ B+ f(x) - f(x)| / max(|f(x)|, 1)`` for an entire ``f``.

    The reference ``f(x)`` comes from ``f.evaluate`` when given, otherwise
    from summing the coefficients directly.
    """
    ctx = spiral.ctx
    x = ctx.num(x)
    borel = q_borel_plus(f, ctx)
    lap = q_laplace_plus(lambda xi: evaluate_coefficients(borel, ctx, xi), spiral, x)
    if f.evaluate is not None:
        ref = ctx.num(f.evaluate(x))
    else:
        ref = ctx.unscale(evaluate_coefficients(f, ctx, x))
    return float(abs(lap.value - ref) / max(float(abs(ref)), 1.0))
