import cmath
import math

import mpmath
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from oracles import phi_naive, poch, poch_inf, psi_naive, rel, theta_sum
from qresum.errors import (
    ConfigError,
    DivergentAtOrigin,
    DivergentSeries,
    DivisionByVanishingFactor,
    MaxTermsExceeded,
    OutsideConvergenceDomain,
    ZeroArgument,
)
from qresum.qcore import (
    QContext,
    SeriesSpec,
    phi_series,
    psi_series,
    qpochhammer,
    qpochhammer_inf,
    qpochhammer_multi,
    theta,
    theta_scaled,
)

qs = st.floats(0.1, 0.6)
radii = st.floats(0.05, 20.0)
angles = st.floats(-math.pi, math.pi)


def spiral_point(r, t):
    return cmath.rect(r, t)


# --- context -----------------------------------------------------------------


@pytest.mark.parametrize("q", [0, 1, 1.5, -1, 1j])
def test_context_rejects_q_off_punctured_disk(q):
    with pytest.raises(ConfigError):
        QContext(q)


def test_context_rejects_bad_caps():
    with pytest.raises(ConfigError):
        QContext(0.5, max_terms=4)
    with pytest.raises(ConfigError):
        QContext(0.5, eps=0.0)
    with pytest.raises(ConfigError):
        QContext(0.5, precision_bits=24)


def test_context_defaults():
    ctx = QContext(0.5)
    assert ctx.eps == 2.0**-53
    assert not ctx.extended
    assert QContext(0.5, precision_bits=113).extended


# --- finite products -----------------------------------------------------------


def test_qpochhammer_examples():
    ctx = QContext(0.25)
    assert QContext(0.5).__class__ is QContext
    assert qpochhammer(0.7, QContext(0.5), 0) == 1
    assert qpochhammer(0.5, ctx, 2) == pytest.approx(0.4375, rel=1e-15)
    assert qpochhammer(0.5, ctx, -1) == pytest.approx(-1.0, rel=1e-15)


def test_qpochhammer_negative_index_resonance():
    ctx = QContext(0.5)
    with pytest.raises(DivisionByVanishingFactor):
        qpochhammer(0.25, ctx, -3)


@given(qs, st.floats(-2, 2), st.integers(-8, 8))
def test_qpochhammer_matches_explicit_product(q, a, n):
    ctx = QContext(q)
    try:
        v = qpochhammer(a, ctx, n)
    except DivisionByVanishingFactor:
        return
    assert rel(v, poch(a, q, n)) < 1e-12


@given(qs, radii, angles, st.integers(-6, 6), st.integers(-6, 6))
def test_qpochhammer_splits(q, r, t, m, n):
    ctx = QContext(q)
    a = spiral_point(r, t)
    try:
        lhs = qpochhammer(a, ctx, m + n)
        rhs = qpochhammer(a, ctx, m) * qpochhammer(a * q**m, ctx, n)
    except DivisionByVanishingFactor:
        return
    assume(abs(lhs) > 1e-200)
    # a factor 1 - a q^j near zero amplifies rounding by 1/|1 - a q^j|
    gaps = [abs(1 - a * q**j) for j in range(-13, 13)]
    cond = max((1 / g for g in gaps if g > 0), default=1)
    assert rel(lhs, rhs) < 1e-13 * max(cond, 1)


# --- infinite products ---------------------------------------------------------


def test_qpochhammer_inf_examples():
    ctx = QContext(0.5)
    zero = qpochhammer_inf(0, ctx)
    assert zero.value == 1 and zero.terms_used_pos <= 2
    assert qpochhammer_inf(1, ctx).value == 0
    brute = 1.0
    for k in range(200):
        brute *= 1 - 0.5 * 0.5**k
    assert rel(qpochhammer_inf(0.5, ctx).value, brute) < 1e-14


def test_qpochhammer_inf_cap():
    with pytest.raises(MaxTermsExceeded):
        qpochhammer_inf(0.5, QContext(0.999, max_terms=8))


@given(qs, radii, angles)
def test_qpochhammer_inf_matches_mpmath(q, r, t):
    a = spiral_point(r, t)
    v = qpochhammer_inf(a, QContext(q))
    assert v.converged
    ref = complex(mpmath.qp(a, q))
    assert abs(v.value - ref) <= 1e-12 * max(abs(ref), 1)


def test_qpochhammer_multi():
    ctx = QContext(0.5)
    assert qpochhammer_multi([0, 0, 0], ctx).value == 1
    assert qpochhammer_multi([0.3 + 0.1j], ctx).value == qpochhammer_inf(0.3 + 0.1j, ctx).value
    ref = poch_inf(0.3, 0.5) * poch_inf(0.6, 0.5)
    assert rel(qpochhammer_multi([0.3, 0.6], ctx).value, ref) < 1e-14


# --- theta --------------------------------------------------------------------------


def test_theta_examples():
    ctx = QContext(0.5)
    assert abs(theta(-1, ctx).value) < 1e-15
    triple = qpochhammer_multi([0.5, -1, -0.5], ctx).value
    assert rel(theta(1, ctx).value, triple) < 1e-14
    c3 = QContext(0.3)
    assert rel(theta(0.5, c3).value * 2, theta(2, c3).value) < 1e-14
    with pytest.raises(ZeroArgument):
        theta(0, ctx)


@given(qs, radii, angles)
def test_theta_matches_brute_force(q, r, t):
    x = spiral_point(r, t)
    v = theta(x, QContext(q))
    assert v.converged
    ref = theta_sum(x, q)
    assert abs(v.value - ref) <= 1e-13 * max(abs(ref), 1, max(abs(x), 1 / abs(x)))


@given(qs, radii, angles)
def test_triple_product(q, r, t):
    ctx = QContext(q)
    x = spiral_point(r, t)
    lhs = theta(x, ctx).value
    rhs = qpochhammer_multi([q, -x, -q / x], ctx).value
    # compare against the sum's largest term, which sets the attainable accuracy
    scale = max(abs(lhs), abs(rhs), 1e-300)
    assert abs(lhs - rhs) <= 1e-12 * scale or abs(lhs - rhs) <= 1e-13 * max(abs(x), 1 / abs(x))


@given(qs, st.floats(0.2, 5.0), angles, st.integers(-3, 3))
def test_theta_shift(q, r, t, k):
    ctx = QContext(q)
    x = spiral_point(r, t)
    lhs = theta(q**k * x, ctx).value
    rhs = q ** (-k * (k - 1) / 2) * x ** (-k) * theta(x, ctx).value
    assert rel(lhs, rhs) < 1e-12


@given(qs, radii, angles)
def test_theta_inversion(q, r, t):
    ctx = QContext(q)
    x = spiral_point(r, t)
    assert rel(theta(1 / x, ctx).value, theta(x, ctx).value / x) < 1e-12


@given(qs, st.floats(0.3, 3.0), st.floats(0.2, 1.2), st.floats(0.1, 10.0), angles)
def test_sign_quasiperiod(q, lr, lt, r, t):
    ctx = QContext(q)
    lam = spiral_point(lr, lt)
    x = spiral_point(r, t)

    def u(y):
        return theta(-lam * y, ctx).value / theta(lam * y, ctx).value

    assert rel(u(q * x), -u(x)) < 1e-12


def test_theta_extreme_argument_stays_finite():
    ctx = QContext(0.1)
    x = 1e250 * cmath.exp(0.3j)
    big, small = theta_scaled(x, ctx), theta_scaled(0.1 * x, ctx)
    assert math.isfinite(big.log) and big.log > 700
    # theta(q x) = theta(x) / x, checked on the log scale
    ratio = complex(big.mant / small.mant) * cmath.exp(big.log - small.log)
    assert rel(ratio, x) < 1e-9


def test_theta_extended_precision():
    ctx = QContext(0.3, precision_bits=113)
    x = mpmath.mpc(1.7, 0.4)
    v = theta(x, ctx)
    with mpmath.workdps(60):
        ref = mpmath.fsum(mpmath.mpf(0.3) ** (n * (n - 1) // 2) * mpmath.mpc(1.7, 0.4) ** n for n in range(-60, 61))
    assert abs(v.value - ref) < 1e-31 * abs(ref)


# --- series ---------------------------------------------------------------------


def test_phi_examples():
    ctx = QContext(0.5)
    assert phi_series(SeriesSpec.phi([0.3], []), ctx, 0).value == 1
    v = phi_series(SeriesSpec.phi([0.3, 0.7], [0.9]), ctx, 0.4)
    assert rel(v.value, phi_naive([0.3, 0.7], [0.9], 0.5, 0.4, terms=60)) < 1e-14
    assert rel(v.value, complex(mpmath.qhyper([0.3, 0.7], [0.9], 0.5, 0.4))) < 1e-14
    big = phi_series(SeriesSpec.phi([0.3], [0.6]), ctx, 1e3)
    assert big.converged
    assert rel(big.value, phi_naive([0.3], [0.6], 0.5, 1e3)) < 1e-12


def test_phi_domain_errors():
    ctx = QContext(0.5)
    with pytest.raises(OutsideConvergenceDomain):
        phi_series(SeriesSpec.phi([0.3, 0.7], [0.9]), ctx, 1.0)
    with pytest.raises(DivergentSeries):
        phi_series(SeriesSpec.phi([0.3, 0.7, 0.2], [0.9]), ctx, 0.1)


def test_phi_rejects_denominator_on_negative_powers():
    ctx = QContext(0.5)
    with pytest.raises(Exception):
        phi_series(SeriesSpec.phi([0.3], [4.0]), ctx, 0.1)


@given(qs, st.lists(st.tuples(st.floats(0.2, 3.0), angles), min_size=0, max_size=3),
       st.lists(st.tuples(st.floats(0.05, 0.9), angles), min_size=0, max_size=3),
       st.floats(0.01, 0.8), angles)
def test_phi_matches_naive(q, a, b, r, t):
    a = [spiral_point(*p) for p in a]
    b = [spiral_point(*p) for p in b]
    assume(len(a) - len(b) <= 1)
    x = spiral_point(r if len(a) - len(b) == 1 else 5 * r, t)
    v = phi_series(SeriesSpec.phi(a, b), QContext(q), x)
    assert v.converged
    ref = phi_naive(a, b, q, x, terms=400)
    assert abs(v.value - ref) <= 1e-11 * max(abs(ref), 1)


def test_psi_examples():
    ctx = QContext(0.3)
    v = psi_series(SeriesSpec.psi([0.5], [0.2]), ctx, 0.6)
    prod = (qpochhammer_multi([0.3, 0.4, 0.3, 1.0], ctx).value
            / qpochhammer_multi([0.2, 0.6, 0.6, 0.2 / 0.3], ctx).value)
    # a z = q here, so (q/az; q)_inf = 0 and the sum vanishes
    assert abs(v.value - prod) < 1e-12
    confl = psi_series(SeriesSpec.psi([0.7, 0.3], [0.9, 0]), QContext(0.4), 0.5j)
    assert confl.converged
    with pytest.raises(DivergentAtOrigin):
        psi_series(SeriesSpec.psi([0.7, 0.3], [0.9]), QContext(0.4), 0.5)


def test_psi_annulus():
    ctx = QContext(0.3)
    spec = SeriesSpec.psi([0.5], [0.2])
    with pytest.raises(OutsideConvergenceDomain):
        psi_series(spec, ctx, 0.39)
    with pytest.raises(OutsideConvergenceDomain):
        psi_series(spec, ctx, 1.0)
    with pytest.raises(OutsideConvergenceDomain):
        psi_series(SeriesSpec.psi([], [0.5]), ctx, 0.4)


@given(qs, st.floats(0.3, 3.0), angles, st.floats(0.05, 0.6), angles, st.floats(0.1, 0.9), angles)
def test_psi_matches_naive(q, ar, at, ratio, bt, s, xt):
    a = spiral_point(ar, at)
    b = a * spiral_point(ratio, bt)
    rad = abs(b / a)
    x = spiral_point(rad + s * (1 - rad), xt)
    assume(rad * 1.05 < abs(x) < 0.95)
    ctx = QContext(q)
    try:
        v = psi_series(SeriesSpec.psi([a], [b]), ctx, x)
    except (DivisionByVanishingFactor, ValueError):
        return
    ref = psi_naive([a], [b], q, x, terms=900)
    assert abs(v.value - ref) <= 1e-10 * max(abs(ref), 1)


@given(qs, radii, angles)
def test_converged_contract(q, r, t):
    ctx = QContext(q)
    for v in (theta(spiral_point(r, t), ctx), qpochhammer_inf(spiral_point(r, t), ctx)):
        if v.converged:
            assert v.last_term_mag <= ctx.eps * max(abs(v.value), 1)
