"""Residuals, identity sweeps and report files.

A sweep evaluates one identity at every point of a parameter grid and keeps a
record per point.  Precondition violations become ``skip`` records and
numerical failures become ``fail`` records; only a malformed config raises.
"""

from __future__ import annotations

import cmath
import csv
import enum
import io
import json
import math
import random
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, NamedTuple, Sequence

from . import connection, resummation
from .errors import ConfigError, DomainError, QSeriesError
from .qcore import (
    QContext,
    SeriesSpec,
    phi_series,
    psi_series,
    qpochhammer,
    qpochhammer_multi,
    theta,
)
from .resummation import BilateralCoefficients, Psi1Params, SpiralSpec


class Identity(str, enum.Enum):
    TRIPLE_PRODUCT = "triple_product"
    THETA_SHIFT = "theta_shift"
    THETA_INVERSION = "theta_inversion"
    SIGN_QUASIPERIOD = "sign_quasiperiod"
    RAMANUJAN = "ramanujan"
    WATSON = "watson"
    SLATER_R = "slater_r"
    COROLLARY = "corollary"
    MAIN_THEOREM = "main_theorem"
    ELLIPTICITY = "ellipticity"
    QDE_RESIDUAL = "qde_residual"
    ROUNDTRIP = "roundtrip"


DEFAULT_TOLERANCE = {
    Identity.TRIPLE_PRODUCT: 1e-12,
    Identity.THETA_SHIFT: 1e-12,
    Identity.THETA_INVERSION: 1e-12,
    Identity.SIGN_QUASIPERIOD: 1e-12,
    Identity.RAMANUJAN: 1e-10,
    Identity.WATSON: 1e-9,
    Identity.SLATER_R: 1e-9,
    Identity.COROLLARY: 1e-10,
    Identity.MAIN_THEOREM: 1e-8,
    Identity.ELLIPTICITY: 1e-10,
    Identity.QDE_RESIDUAL: 1e-9,
    Identity.ROUNDTRIP: 1e-10,
}

# where each checked identity comes from
IDENTITY_SOURCES = {
    Identity.TRIPLE_PRODUCT: "Jacobi triple product: bilateral theta sum equals (q, -x, -q/x; q)_inf",
    Identity.THETA_SHIFT: "theta(q^k x) = q^(-k(k-1)/2) x^(-k) theta(x)",
    Identity.THETA_INVERSION: "theta(1/x) = theta(x)/x",
    Identity.SIGN_QUASIPERIOD: "u(x) = theta(-lam x)/theta(lam x) satisfies u(qx) = -u(x)",
    Identity.RAMANUJAN: "Ramanujan's 1psi1 summation",
    Identity.WATSON: "Watson's connection formula for 2phi1 at infinity",
    Identity.SLATER_R: "Slater's rpsir transformation (idem sum over a1 <-> ak)",
    Identity.COROLLARY: "confluent 2psi2 (b2 -> 0) as two 1phi1 terms",
    Identity.MAIN_THEOREM: "q-Borel-Laplace sum of 2psi1 equals C1 v1 + C2 v2",
    Identity.ELLIPTICITY: "connection coefficients C1, C2 are q-elliptic",
    Identity.QDE_RESIDUAL: "solutions annihilate the second-order 2psi1 and Heine equations",
    Identity.ROUNDTRIP: "q-Laplace of q-Borel is the identity on entire functions",
}


# --- q-difference equations -------------------------------------------------


@dataclass(frozen=True)
class QDifferenceEquation:
    """``sum_k coeff(k, x) * u(q^k x) = 0`` for ``k = 0..order``."""

    order: int
    coeff: Callable[[int, Any], Any]
    label: str
    ctx: QContext

    def sigma(self, u: Callable[[Any], Any], k: int = 1) -> Callable[[Any], Any]:
        """The shift ``x -> u(q^k x)``."""
        qk = self.ctx.q**k
        return lambda x: u(qk * x)

    def scaled(self, c: Any) -> "QDifferenceEquation":
        return QDifferenceEquation(self.order, lambda k, x: c * self.coeff(k, x), f"{c}*{self.label}", self.ctx)


def psi2x1_equation(params: Psi1Params, ctx: QContext) -> QDifferenceEquation:
    """Second-order equation solved by 2psi1(a1, a2; b1; q, x) and by v1, v2."""
    a1, a2, b1 = params.nums(ctx)
    q = ctx.q

    def coeff(k: int, x: Any) -> Any:
        if k == 2:
            return b1 / q**2 - a1 * a2 * x
        if k == 1:
            return -(1 / q - (a1 + a2) * x)
        return -x

    return QDifferenceEquation(2, coeff, "2psi1", ctx)


def heine_equation(a: Any, b: Any, c: Any, ctx: QContext) -> QDifferenceEquation:
    """Heine's equation for 2phi1(a, b; c; q, x)."""
    a, b, c = ctx.num(a), ctx.num(b), ctx.num(c)
    q = ctx.q

    def coeff(k: int, x: Any) -> Any:
        if k == 2:
            return c - a * b * q * x
        if k == 1:
            return -((c + q) - (a + b) * q * x)
        return q * (1 - x)

    return QDifferenceEquation(2, coeff, "heine", ctx)


class Residual(NamedTuple):
    rel: float
    abs: float
    scale: float
    degenerate: bool


def qde_residual(eq: QDifferenceEquation, u: Callable[[Any], Any], x: Any) -> Residual:
    """Residual normalised by the largest summand ``|coeff(k,x) u(q^k x)|``.

    An identically vanishing combination (e.g. ``u == 0``) returns ``rel = 0``
    with ``degenerate=True``.
    """
    ctx = eq.ctx
    x = ctx.num(x)
    terms = []
    for k in range(eq.order + 1):
        v = u(ctx.q**k * x)
        v = getattr(v, "value", v)
        terms.append(eq.coeff(k, x) * v)
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    scale = max(float(abs(t)) for t in terms)
    err = float(abs(total))
    if scale == 0:
        return Residual(0.0, err, 0.0, True)
    return Residual(err / scale, err, scale, False)


# --- sweep data model -------------------------------------------------------


@dataclass
class PointRecord:
    index: int
    inputs: dict
    status: str  # "pass" | "fail" | "skip"
    lhs: list | None = None
    rhs: list | None = None
    abs_residual: float | None = None
    rel_residual: float | None = None
    scale: float | None = None
    converged: bool | None = None
    reason: str = ""
    diagnostics: dict = field(default_factory=dict)


@dataclass
class SweepReport:
    identity: str
    tolerance: float
    seed: int
    precision_bits: int
    records: list[PointRecord] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def counts(self) -> dict[str, int]:
        out = {"pass": 0, "skip": 0, "fail": 0}
        for r in self.records:
            out[r.status] += 1
        return out

    @property
    def max_rel_residual(self) -> float:
        vals = [r.rel_residual for r in self.records if r.rel_residual is not None]
        return max(vals, default=0.0)

    @property
    def ok(self) -> bool:
        return self.counts["fail"] == 0

    def summary(self) -> dict:
        return {
            "identity": self.identity,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "precision_bits": self.precision_bits,
            "points": len(self.records),
            "counts": self.counts,
            "max_rel_residual": self.max_rel_residual,
        }


@dataclass
class SweepConfig:
    identity: Identity
    parameter_grid: list[dict] = field(default_factory=list)
    tolerance: float | None = None
    seed: int = 0
    precision_bits: int = 53

    def __post_init__(self) -> None:
        try:
            self.identity = Identity(self.identity)
        except ValueError as exc:
            raise ConfigError(f"unknown identity {self.identity!r}") from exc
        if self.tolerance is None:
            self.tolerance = DEFAULT_TOLERANCE[self.identity]
        if not (isinstance(self.tolerance, (int, float)) and self.tolerance > 0):
            raise ConfigError("tolerance must be a positive number")
        if not isinstance(self.parameter_grid, list) or not all(isinstance(p, dict) for p in self.parameter_grid):
            raise ConfigError("parameter_grid must be a list of objects")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        unknown = set(d) - {"identity", "parameter_grid", "tolerance", "seed", "precision_bits"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "identity" not in d:
            raise ConfigError("config needs an 'identity'")
        return cls(
            identity=d["identity"],
            parameter_grid=d.get("parameter_grid", []),
            tolerance=d.get("tolerance"),
            seed=d.get("seed", 0),
            precision_bits=d.get("precision_bits", 53),
        )

    @classmethod
    def load(cls, path: str | Path) -> "SweepConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config root must be an object")
        return cls.from_dict(data)


# --- value (de)coding ---------------------------------------------------------


def parse_complex(v: Any) -> complex:
    """Accept a number, ``[re, im]`` or the string ``"re,im"``."""
    if isinstance(v, bool):
        raise ConfigError(f"not a complex value: {v!r}")
    if isinstance(v, (int, float, complex)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        parts = v.split(",")
        try:
            if len(parts) == 1:
                return complex(float(parts[0]), 0.0)
            if len(parts) == 2:
                return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            pass
    raise ConfigError(f"not a complex value: {v!r}")


def _encode(v: Any) -> Any:
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, complex) or hasattr(v, "imag"):
        z = complex(v)
        return [z.real, z.imag]
    if isinstance(v, (list, tuple)):
        return [_encode(x) for x in v]
    if isinstance(v, dict):
        return {k: _encode(x) for k, x in v.items()}
    return str(v)


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _dump(obj: Any, indent: int = 0) -> str:
    """Deterministic JSON writer with 17 significant digits for floats."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(_dump(x) for x in obj) + "]"
        return "[\n" + ",\n".join(pad + _dump(x, indent + 1) for x in obj) + "\n" + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [pad + json.dumps(str(k)) + ": " + _dump(v, indent + 1) for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _decode_float(v: Any) -> Any:
    if isinstance(v, str) and v in ("nan", "inf", "-inf"):
        return float(v)
    return v


# --- report files ---------------------------------------------------------------

CSV_FIELDS = [
    "index", "status", "inputs", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
    "abs_residual", "rel_residual", "scale", "converged", "reason",
]


def report_to_dict(report: SweepReport, include_timing: bool = False) -> dict:
    out = {"summary": report.summary(), "records": [asdict(r) for r in report.records]}
    if include_timing:
        out["wall_time"] = report.wall_time
    return out


def report_from_dict(d: dict) -> SweepReport:
    s = d["summary"]
    records = []
    for r in d["records"]:
        r = dict(r)
        for key in ("abs_residual", "rel_residual", "scale"):
            r[key] = _decode_float(r[key])
        records.append(PointRecord(**r))
    return SweepReport(
        identity=s["identity"],
        tolerance=s["tolerance"],
        seed=s["seed"],
        precision_bits=s["precision_bits"],
        records=records,
        wall_time=d.get("wall_time", 0.0),
    )


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_report(report: SweepReport, format: str, path: str | Path, *, include_timing: bool = False) -> None:
    """Write ``report`` as ``json`` (canonical) or ``csv`` (one row per record).

    Output is byte-stable for identical reports; wall time is left out unless
    ``include_timing`` is set.
    """
    path = Path(path)
    if format == "json":
        text = _dump(report_to_dict(report, include_timing)) + "\n"
    elif format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in report.records:
            lhs = r.lhs or [None, None]
            rhs = r.rhs or [None, None]
            w.writerow([
                _cell(r.index), r.status, json.dumps(r.inputs, sort_keys=False),
                _cell(lhs[0]), _cell(lhs[1]), _cell(rhs[0]), _cell(rhs[1]),
                _cell(r.abs_residual), _cell(r.rel_residual), _cell(r.scale),
                _cell(r.converged), r.reason,
            ])
        text = buf.getvalue()
    else:
        raise ValueError(f"unknown report format {format!r}")
    path.write_text(text)


def read_report(path: str | Path) -> SweepReport:
    return report_from_dict(json.loads(Path(path).read_text()))


# --- identity evaluators ----------------------------------------------------


class Outcome(NamedTuple):
    lhs: Any
    rhs: Any
    scale: float
    converged: bool
    diagnostics: dict


def _c(point: dict, key: str) -> complex:
    if key not in point:
        raise ConfigError(f"grid point is missing {key!r}")
    return parse_complex(point[key])


def _ctx(point: dict, bits: int) -> QContext:
    return QContext(_c(point, "q"), precision_bits=bits)


def _mag(*vals: Any) -> float:
    return max(float(abs(v)) for v in vals)


def _params(point: dict) -> Psi1Params:
    return Psi1Params(_c(point, "a1"), _c(point, "a2"), _c(point, "b1"))


def _spiral(point: dict, ctx: QContext) -> SpiralSpec:
    window = point.get("window")
    return SpiralSpec(_c(point, "lam"), ctx, None if window is None else int(window))


def _two_sided(l: Any, r: Any, extra: Sequence[Any] = ()) -> float:
    return _mag(l, r, *extra)


def _eval_triple(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    x = ctx.num(_c(p, "x"))
    lhs = theta(x, ctx)
    rhs = qpochhammer_multi([ctx.q, -x, -ctx.q / x], ctx)
    return Outcome(lhs.value, rhs.value, _two_sided(lhs.value, rhs.value), lhs.converged and rhs.converged,
                   {"terms_pos": lhs.terms_used_pos, "terms_neg": lhs.terms_used_neg})


def _eval_shift(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    x = ctx.num(_c(p, "x"))
    k = int(p["k"])
    lhs = theta(ctx.q**k * x, ctx)
    base = theta(x, ctx)
    rhs = ctx.q ** (-(k * (k - 1) // 2)) * x ** (-k) * base.value
    return Outcome(lhs.value, rhs, _two_sided(lhs.value, rhs), lhs.converged and base.converged, {})


def _eval_inversion(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    x = ctx.num(_c(p, "x"))
    lhs = theta(1 / x, ctx)
    base = theta(x, ctx)
    rhs = base.value / x
    return Outcome(lhs.value, rhs, _two_sided(lhs.value, rhs), lhs.converged and base.converged, {})


def _eval_sign(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    x = ctx.num(_c(p, "x"))
    lam = ctx.num(_c(p, "lam"))

    def u(y: Any) -> Any:
        return connection.theta_ratio(-lam * y, lam * y, ctx)

    lhs = u(ctx.q * x)
    rhs = -u(x)
    return Outcome(lhs, rhs, _two_sided(lhs, rhs), True, {})


def _eval_ramanujan(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    a, b, z = _c(p, "a"), _c(p, "b"), _c(p, "z")
    rhs = connection.ramanujan_product(a, b, ctx, z)
    lhs = psi_series(SeriesSpec.psi([a], [b]), ctx, z)
    return Outcome(lhs.value, rhs.value, _two_sided(lhs.value, rhs.value), lhs.converged and rhs.converged,
                   {"terms_pos": lhs.terms_used_pos, "terms_neg": lhs.terms_used_neg})


def _eval_watson(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    a, b, c, x = (_c(p, k) for k in "abcx")
    if not abs(x) < 1:
        raise DomainError("Watson's left side needs |x| < 1")
    terms, parts = connection.watson_terms(a, b, c, ctx, x)
    lhs = phi_series(SeriesSpec.phi([a, b], [c]), ctx, x)
    rhs = sum(terms[1:], terms[0])
    return Outcome(lhs.value, rhs, _two_sided(lhs.value, rhs, terms),
                   lhs.converged and all(t.converged for t in parts), {"terms_lhs": lhs.terms_used_pos})


def _eval_slater(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    a = [parse_complex(v) for v in p["a"]]
    b = [parse_complex(v) for v in p["b"]]
    x = _c(p, "x")
    params = connection.SlaterParams(a, b)
    terms, parts = connection.slater_terms(params, ctx, x)
    series = psi_series(SeriesSpec.psi(a, b), ctx, x)
    lhs = connection.slater_prefactor(params, ctx, x) * series.value
    rhs = sum(terms[1:], terms[0])
    return Outcome(lhs, rhs, _two_sided(lhs, rhs, terms),
                   series.converged and all(t.converged for t in parts), {"r": len(a)})


def _eval_corollary(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    params = _params(p)
    x = _c(p, "x")
    terms, parts = connection.corollary_terms(params, ctx, x)
    a1, a2, b1 = params.nums(ctx)
    lhs = psi_series(SeriesSpec.psi([a1, a2], [b1, 0]), ctx, x)
    rhs = sum(terms[1:], terms[0])
    return Outcome(lhs.value, rhs, _two_sided(lhs.value, rhs, terms),
                   lhs.converged and all(t.converged for t in parts), {})


def _eval_main(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    params = _params(p)
    spiral = _spiral(p, ctx)
    x = _c(p, "x")
    terms, parts = connection.main_theorem_terms(params, spiral, x)
    lhs = resummation.resum_2psi1(params, spiral, x)
    rhs = sum(terms[1:], terms[0])
    return Outcome(lhs.value, rhs, _two_sided(lhs.value, rhs, terms),
                   lhs.converged and all(t.converged for t in parts),
                   {"laplace_terms_pos": lhs.terms_used_pos, "laplace_terms_neg": lhs.terms_used_neg})


def _eval_ellipticity(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    spec = connection.ConnectionCoefficientSpec(_params(p), _spiral(p, ctx), int(p.get("which", 1)))
    x = ctx.num(_c(p, "x"))
    lhs = connection.connection_coefficient(spec, ctx.q * x).value
    rhs = connection.connection_coefficient(spec, x).value
    return Outcome(lhs, rhs, float(abs(rhs)) + 1.0, True, {})


def _qde_target(p: dict, ctx: QContext) -> tuple[QDifferenceEquation, Callable[[Any], Any]]:
    fn = p.get("function")
    if fn in ("v1", "v2", "resum", "main_rhs"):
        params = _params(p)
        eq = psi2x1_equation(params, ctx)
        if fn in ("v1", "v2"):
            which = int(fn[1])
            return eq, lambda y: connection.v_solution(params, ctx, which, y)
        spiral = _spiral(p, ctx)
        if fn == "resum":
            return eq, lambda y: resummation.resum_2psi1(params, spiral, y)
        return eq, lambda y: connection.main_theorem_rhs(params, spiral, y)
    if fn in ("phi21", "watson_rhs"):
        a, b, c = (_c(p, k) for k in "abc")
        eq = heine_equation(a, b, c, ctx)
        if fn == "phi21":
            return eq, lambda y: phi_series(SeriesSpec.phi([a, b], [c]), ctx, y)
        return eq, lambda y: connection.watson_rhs(a, b, c, ctx, y)
    raise ConfigError(f"unknown qde_residual function {fn!r}")


def _eval_qde(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    eq, u = _qde_target(p, ctx)
    res = qde_residual(eq, u, _c(p, "x"))
    return Outcome(res.abs, 0.0, res.scale, not res.degenerate, {"equation": eq.label})


def roundtrip_function(name: str, ctx: QContext, c: Any = 0.3) -> BilateralCoefficients:
    """Entire test functions for the Borel-Laplace roundtrip."""
    if name == "one":
        return BilateralCoefficients(lambda n: 1.0, "1", 0, 0, evaluate=lambda x: 1.0)
    if name == "cube":
        return BilateralCoefficients(lambda n: 1.0, "x^3", 3, 3, evaluate=lambda x: x**3)
    if name == "linear":
        return BilateralCoefficients(lambda n: 1.0, "1+x", 0, 1, evaluate=lambda x: 1 + x)
    if name == "phi01":
        c = ctx.num(c)
        q = ctx.q

        def coeff(n: int) -> Any:
            return q ** (n * (n - 1)) / (qpochhammer(c, ctx, n) * qpochhammer(q, ctx, n))

        spec = SeriesSpec.phi([], [c])
        return BilateralCoefficients(coeff, f"0phi1(;{c})", 0, None,
                                     evaluate=lambda x: phi_series(spec, ctx, x).value)
    raise ConfigError(f"unknown roundtrip function {name!r}")


def _eval_roundtrip(p: dict, bits: int) -> Outcome:
    ctx = _ctx(p, bits)
    spiral = _spiral(p, ctx)
    f = roundtrip_function(p.get("f", "one"), ctx, parse_complex(p.get("c", 0.3)))
    x = ctx.num(_c(p, "x"))
    borel = resummation.q_borel_plus(f, ctx)
    lap = resummation.q_laplace_plus(lambda xi: resummation.evaluate_coefficients(borel, ctx, xi), spiral, x)
    ref = ctx.num(f.evaluate(x))
    return Outcome(lap.value, ref, max(float(abs(ref)), 1.0), lap.converged,
                   {"terms_pos": lap.terms_used_pos, "terms_neg": lap.terms_used_neg})


EVALUATORS: dict[Identity, Callable[[dict, int], Outcome]] = {
    Identity.TRIPLE_PRODUCT: _eval_triple,
    Identity.THETA_SHIFT: _eval_shift,
    Identity.THETA_INVERSION: _eval_inversion,
    Identity.SIGN_QUASIPERIOD: _eval_sign,
    Identity.RAMANUJAN: _eval_ramanujan,
    Identity.WATSON: _eval_watson,
    Identity.SLATER_R: _eval_slater,
    Identity.COROLLARY: _eval_corollary,
    Identity.MAIN_THEOREM: _eval_main,
    Identity.ELLIPTICITY: _eval_ellipticity,
    Identity.QDE_RESIDUAL: _eval_qde,
    Identity.ROUNDTRIP: _eval_roundtrip,
}


# --- default grids ------------------------------------------------------------


def _polar(rng: random.Random, rmin: float, rmax: float, amin: float = -math.pi, amax: float = math.pi) -> list[float]:
    r = math.exp(rng.uniform(math.log(rmin), math.log(rmax)))
    z = cmath.rect(r, rng.uniform(amin, amax))
    return [z.real, z.imag]


def _psi1_point(rng: random.Random) -> dict:
    q = rng.uniform(0.2, 0.5)
    return {
        "q": q,
        "a1": _polar(rng, 0.4, 1.5),
        "a2": _polar(rng, 0.4, 1.5),
        "b1": _polar(rng, 0.05, 0.5),
    }


def _radius(p: dict) -> float:
    a1, a2, b1 = (parse_complex(p[k]) for k in ("a1", "a2", "b1"))
    return abs(b1 / (a1 * a2))


def _lam(rng: random.Random) -> list[float]:
    return _polar(rng, 0.6, 1.8, 0.2, 1.2)


def default_grid(identity: Identity | str, seed: int = 0) -> list[dict]:
    """Built-in grid for ``identity``; every point is drawn from ``seed``."""
    identity = Identity(identity)
    rng = random.Random(f"{identity.value}:{seed}")
    grid: list[dict] = []
    if identity is Identity.TRIPLE_PRODUCT:
        for q in (0.1, 0.3, 0.5):
            for _ in range(12):
                grid.append({"q": q, "x": _polar(rng, 0.05, 20.0)})
    elif identity is Identity.THETA_SHIFT:
        for q in (0.1, 0.3, 0.5):
            x = _polar(rng, 0.2, 5.0)
            for k in range(-3, 4):
                grid.append({"q": q, "x": x, "k": k})
    elif identity is Identity.THETA_INVERSION:
        for q in (0.1, 0.3, 0.5):
            for _ in range(4):
                grid.append({"q": q, "x": _polar(rng, 0.05, 20.0)})
    elif identity is Identity.SIGN_QUASIPERIOD:
        for q in (0.1, 0.3, 0.5):
            for _ in range(4):
                grid.append({"q": q, "lam": _lam(rng), "x": _polar(rng, 0.1, 10.0)})
    elif identity is Identity.RAMANUJAN:
        for _ in range(12):
            a = _polar(rng, 0.3, 2.0)
            ratio = rng.uniform(0.05, 0.5)
            b = complex(*a) * cmath.rect(ratio, rng.uniform(-math.pi, math.pi))
            grid.append({"q": rng.uniform(0.1, 0.6), "a": a, "b": [b.real, b.imag],
                         "z": _polar(rng, ratio * 1.4, 0.85)})
    elif identity is Identity.WATSON:
        for _ in range(6):
            q = rng.uniform(0.2, 0.6)
            a, b, c = _polar(rng, 1.5, 6.0), _polar(rng, 1.5, 6.0), _polar(rng, 0.1, 0.8)
            low = abs(complex(*c) * q / (complex(*a) * complex(*b)))
            grid.append({"q": q, "a": a, "b": b, "c": c, "x": _polar(rng, max(2 * low, 0.1), 0.8)})
    elif identity is Identity.SLATER_R:
        for r in (1, 2, 3):
            for _ in range(5):
                q = rng.uniform(0.2, 0.5)
                a = [_polar(rng, 0.8, 3.0) for _ in range(r)]
                b = [_polar(rng, 0.1, 0.7) for _ in range(r)]
                big = 1.0
                for v in a:
                    big *= abs(complex(*v))
                small = 1.0
                for v in b:
                    small *= abs(complex(*v))
                radius = small / big
                grid.append({"q": q, "a": a, "b": b, "x": _polar(rng, max(1.6 * radius, 0.3), 0.8)})
    elif identity is Identity.COROLLARY:
        for _ in range(6):
            p = _psi1_point(rng)
            p["x"] = _polar(rng, 0.1, 0.9)
            grid.append(p)
    elif identity is Identity.MAIN_THEOREM:
        for _ in range(6):
            p = _psi1_point(rng)
            p["lam"] = _lam(rng)
            p["x"] = _polar(rng, 3.0 * _radius(p), 8.0 * _radius(p))
            grid.append(p)
    elif identity is Identity.ELLIPTICITY:
        for which in (1, 2):
            for _ in range(5):
                p = _psi1_point(rng)
                p.update(lam=_lam(rng), x=_polar(rng, 0.1, 10.0), which=which)
                grid.append(p)
    elif identity is Identity.QDE_RESIDUAL:
        for fn in ("v1", "v2", "resum", "main_rhs"):
            for _ in range(2):
                p = _psi1_point(rng)
                q = p["q"]
                p.update(function=fn, lam=_lam(rng),
                         x=_polar(rng, 3.0 * _radius(p) / q**2, 6.0 * _radius(p) / q**2))
                grid.append(p)
        for fn in ("phi21", "watson_rhs"):
            for _ in range(2):
                q = rng.uniform(0.3, 0.6)
                a, b, c = _polar(rng, 2.0, 6.0), _polar(rng, 2.0, 6.0), _polar(rng, 0.05, 0.3)
                low = abs(complex(*c) * q / (complex(*a) * complex(*b))) / q**2
                grid.append({"q": q, "a": a, "b": b, "c": c, "function": fn,
                             "x": _polar(rng, max(2 * low, 0.2), 0.8)})
    elif identity is Identity.ROUNDTRIP:
        for f in ("one", "cube", "linear", "phi01"):
            q = 0.5
            lam = _lam(rng)
            for _ in range(5):
                grid.append({"q": q, "lam": lam, "f": f, "c": 0.3, "x": _polar(rng, 0.2, 4.0)})
    return grid


# --- sweeps -----------------------------------------------------------------------


def evaluate_point(identity: Identity, point: dict, index: int, tolerance: float, bits: int) -> PointRecord:
    inputs = _encode(point)
    try:
        out = EVALUATORS[identity](point, bits)
    except ConfigError:
        raise
    except DomainError as exc:
        return PointRecord(index, inputs, "skip", reason=f"{type(exc).__name__}: {exc}")
    except (QSeriesError, ArithmeticError) as exc:
        return PointRecord(index, inputs, "fail", reason=f"{type(exc).__name__}: {exc}")
    lhs, rhs = complex(out.lhs), complex(out.rhs)
    err = float(abs(out.lhs - out.rhs))
    scale = float(out.scale)
    if scale == 0:
        rel = 0.0 if err == 0 else math.inf
    else:
        rel = err / scale
    ok = rel <= tolerance and out.converged and math.isfinite(rel)
    reason = ""
    if not out.converged:
        reason = "truncation did not converge"
    elif not ok:
        reason = f"relative residual {rel:.3e} > {tolerance:.1e}"
    return PointRecord(
        index, inputs, "pass" if ok else "fail",
        lhs=[lhs.real, lhs.imag], rhs=[rhs.real, rhs.imag],
        abs_residual=float(err), rel_residual=float(rel), scale=scale,
        converged=bool(out.converged), reason=reason, diagnostics=_encode(out.diagnostics),
    )


def run_sweep(config: SweepConfig) -> SweepReport:
    """Evaluate ``config.identity`` at every grid point (default grid if none given)."""
    grid = config.parameter_grid or default_grid(config.identity, config.seed)
    start = time.perf_counter()
    records = [
        evaluate_point(config.identity, point, i, config.tolerance, config.precision_bits)
        for i, point in enumerate(grid)
    ]
    return SweepReport(
        identity=config.identity.value,
        tolerance=float(config.tolerance),
        seed=config.seed,
        precision_bits=config.precision_bits,
        records=records,
        wall_time=time.perf_counter() - start,
    )


def verify_all(seed: int = 0, tolerance: float | None = None, precision_bits: int = 53) -> list[SweepReport]:
    return [
        run_sweep(SweepConfig(identity, tolerance=tolerance, seed=seed, precision_bits=precision_bits))
        for identity in Identity
    ]
