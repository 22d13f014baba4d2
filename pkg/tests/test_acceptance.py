"""Acceptance criteria 1-11, one test each; the summary prints a pass/fail line per criterion."""

import cmath
import dataclasses
import io
import time

import pytest

from points import MAIN_POINTS
from qresum import connection
from qresum.cli import main
from qresum.connection import Coefficient, SlaterParams, corollary_2psi2_rhs, slater_prefactor, slater_rhs, watson_rhs
from qresum.qcore import QContext, SeriesSpec, phi_series
from qresum.resummation import Psi1Params, SpiralSpec, resum_2psi1
from qresum.verify import Identity, SweepConfig, default_grid, heine_equation, psi2x1_equation, qde_residual, run_sweep


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def sweep(identity, grid=None, tolerance=None):
    return run_sweep(SweepConfig(identity, grid or [], tolerance))


def passed(report):
    return report.counts["pass"]


def as_grid_point(p):
    return {k: [complex(v).real, complex(v).imag] if isinstance(v, complex) else v for k, v in p.items()}


@pytest.mark.criterion(1)
def test_triple_product(record_property):
    with Clock() as t:
        report = sweep("triple_product", tolerance=1e-12)
    record_property("detail", f"{passed(report)}/36 points, max rel {report.max_rel_residual:.1e}, {t.elapsed:.2f}s")
    assert len(report.records) == 36 and report.ok and passed(report) == 36
    assert t.elapsed < 1


@pytest.mark.criterion(2)
def test_theta_functional_equations(record_property):
    with Clock() as t:
        reports = [sweep(i, tolerance=1e-12) for i in ("theta_shift", "theta_inversion", "sign_quasiperiod")]
    shifts = {r.inputs["k"] for r in reports[0].records}
    worst = max(r.max_rel_residual for r in reports)
    record_property("detail", f"{sum(map(passed, reports))} points, max rel {worst:.1e}, {t.elapsed:.2f}s")
    assert shifts == set(range(-3, 4))
    assert all(r.ok and passed(r) == len(r.records) for r in reports)
    assert t.elapsed < 1


@pytest.mark.criterion(3)
def test_ramanujan_sum(record_property):
    with Clock() as t:
        report = sweep("ramanujan", tolerance=1e-10)
    record_property("detail", f"{passed(report)} tuples, max rel {report.max_rel_residual:.1e}, {t.elapsed:.2f}s")
    assert report.ok and passed(report) >= 10
    assert t.elapsed < 5


HEINE_POINTS = [
    (0.5, 5.0, 4.0, 0.05, cmath.rect(0.7, 0.4)),
    (0.5, 3.0, -2.5, 0.2j, cmath.rect(0.6, -1.0)),
    (0.3, 2.0 + 1j, 4.0, 0.1, cmath.rect(0.8, 2.0)),
    (0.4, -3.0, 2.0j, 0.3, cmath.rect(0.5, 0.3)),
    (0.6, 4.0, 4.5j, 0.5 - 0.2j, cmath.rect(0.75, -2.5)),
]


@pytest.mark.criterion(4)
def test_watson_formula(record_property):
    with Clock() as t:
        report = sweep("watson", tolerance=1e-9)
        heine = []
        for q, a, b, c, x in HEINE_POINTS:
            ctx = QContext(q)
            eq = heine_equation(a, b, c, ctx)
            left = qde_residual(eq, lambda y: phi_series(SeriesSpec.phi([a, b], [c]), ctx, y), x)
            right = qde_residual(eq, lambda y: watson_rhs(a, b, c, ctx, y), x)
            heine += [left.rel, right.rel]
    record_property("detail", f"{passed(report)} tuples, max rel {report.max_rel_residual:.1e}, "
                              f"Heine max {max(heine):.1e}, {t.elapsed:.2f}s")
    assert report.ok and passed(report) >= 5
    assert max(heine) <= 1e-9
    assert t.elapsed < 5


@pytest.mark.criterion(5)
def test_slater(record_property):
    with Clock() as t:
        report = sweep("slater_r", tolerance=1e-9)
    per_r = {r: sum(1 for rec in report.records if rec.status == "pass" and len(rec.inputs["a"]) == r)
             for r in (1, 2, 3)}
    record_property("detail", f"passes per r {per_r}, max rel {report.max_rel_residual:.1e}, {t.elapsed:.2f}s")
    assert report.ok and min(per_r.values()) >= 5
    assert t.elapsed < 30


@pytest.mark.criterion(6)
def test_corollary(record_property):
    with Clock() as t:
        report = sweep("corollary", tolerance=1e-10)
        ctx = QContext(0.4)
        ref = corollary_2psi2_rhs(Psi1Params(0.7, 0.3, 0.9), ctx, 0.5).value
        errors = []
        for k in range(4, 9):
            params = SlaterParams([0.7, 0.3], [0.9, 10.0**-k])
            v = slater_rhs(params, ctx, 0.5).value / slater_prefactor(params, ctx, 0.5)
            errors.append(abs(v - ref) / abs(ref))
    record_property("detail", f"{passed(report)} tuples, max rel {report.max_rel_residual:.1e}, "
                              f"b2 limit {errors[0]:.1e} -> {errors[-1]:.1e}, {t.elapsed:.2f}s")
    assert report.ok and passed(report) >= 5
    assert all(e2 < e1 for e1, e2 in zip(errors, errors[1:]))
    assert t.elapsed < 10


@pytest.mark.criterion(7)
def test_roundtrip(record_property):
    with Clock() as t:
        report = sweep("roundtrip", tolerance=1e-10)
    per_f = {f: sum(1 for rec in report.records if rec.status == "pass" and rec.inputs["f"] == f)
             for f in ("one", "cube", "linear", "phi01")}
    record_property("detail", f"passes per f {per_f}, max rel {report.max_rel_residual:.1e}, {t.elapsed:.2f}s")
    assert report.ok and min(per_f.values()) >= 5
    assert t.elapsed < 5


def main_grid():
    return [as_grid_point(p) for p in MAIN_POINTS] + default_grid(Identity.MAIN_THEOREM)


def main_checks():
    report = sweep("main_theorem", main_grid(), tolerance=1e-8)
    qde, shift = [], []
    for p in MAIN_POINTS:
        ctx = QContext(p["q"])
        params = Psi1Params(p["a1"], p["a2"], p["b1"])
        spiral = SpiralSpec(p["lam"], ctx)
        # move out so x, qx and q^2 x all sit on the certified side
        x = p["x"] / p["q"] ** 2
        eq = psi2x1_equation(params, ctx)
        qde.append(qde_residual(eq, lambda y: resum_2psi1(params, spiral, y), x).rel)
        qde.append(qde_residual(eq, lambda y: connection.main_theorem_rhs(params, spiral, y), x).rel)
        a = resum_2psi1(params, spiral, p["x"]).value
        b = resum_2psi1(params, spiral.shifted(1), p["x"]).value
        shift.append(abs(a - b) / abs(a))
    return report, max(qde), max(shift)


@pytest.mark.criterion(8)
def test_main_theorem(record_property):
    with Clock() as t:
        report, qde, shift = main_checks()
    record_property("detail", f"{passed(report)} tuples, max rel {report.max_rel_residual:.1e}, "
                              f"2psi1 equation residual {qde:.1e}, lambda->q lambda {shift:.1e}, {t.elapsed:.2f}s")
    assert report.ok and passed(report) >= 5
    assert qde <= 1e-9
    assert shift <= 1e-10
    assert t.elapsed < 60


@pytest.mark.criterion(9)
def test_ellipticity(record_property):
    with Clock() as t:
        report = sweep("ellipticity", tolerance=1e-10)
    which = {rec.inputs["which"] for rec in report.records}
    record_property("detail", f"{passed(report)} points, max rel {report.max_rel_residual:.1e}, {t.elapsed:.2f}s")
    assert which == {1, 2}
    assert report.ok and passed(report) == len(report.records) >= 10
    assert t.elapsed < 5


@pytest.mark.criterion(10)
def test_mutation_sign_flip_in_c2(record_property, monkeypatch, tmp_path):
    original = connection.connection_coefficient

    def flipped(spec, x):
        out = original(spec, x)
        if spec.which is Coefficient.C2:
            return dataclasses.replace(out, value=-out.value)
        return out

    monkeypatch.setattr(connection, "connection_coefficient", flipped)
    report = sweep("main_theorem", main_grid(), tolerance=1e-8)
    code = main(["verify-all", "--out", str(tmp_path)], io.StringIO(), io.StringIO())
    record_property("detail", f"mutant main_theorem fails {report.counts['fail']}/{len(report.records)}, "
                              f"verify-all exit {code}")
    assert report.counts["fail"] == len(report.records)
    assert code == 1


@pytest.mark.criterion(11)
def test_determinism(record_property, tmp_path):
    runs = []
    for name in ("a", "b"):
        code = main(["verify-all", "--out", str(tmp_path / name), "--seed", "11"], io.StringIO(), io.StringIO())
        assert code == 0
        runs.append({p.name: p.read_bytes() for p in sorted((tmp_path / name).glob("*.json"))})
    record_property("detail", f"{len(runs[0])} json reports compared byte for byte")
    assert len(runs[0]) == 12
    assert runs[0] == runs[1]
