"""Compare closed forms that differ by a factor against direct summation.

Two rearrangements are checked:

* Ramanujan's 1psi1 sum as a theta ratio times a 1phi0 series, in the form
  with 1phi0(aq/b; -; q, b/(az)) and the form with 1phi0(a; -; q, q/(az)).
* The connection constant of C1, C2 with and without the factor
  (q a_j; q)_inf / (q/a_j; q)_inf, against the resummed 2psi1.
"""

import cmath
import math

from qresum.connection import (
    ConnectionCoefficientSpec,
    connection_coefficient,
    ramanujan_product,
    ramanujan_theta_form,
    theta_ratio,
    v_solution,
)
from qresum.qcore import QContext, SeriesSpec, phi_series, pochhammer_ratio, psi_series
from qresum.resummation import Psi1Params, SpiralSpec, resum_2psi1


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def ramanujan_forms() -> None:
    print("1psi1(a; b; q, z): series vs product and the two theta forms")
    print(f"{'q':>5}{'a':>18}{'b':>18}{'z':>18}{'product':>10}{'aq/b form':>11}{'a form':>10}")
    cases = [
        (0.3, 0.5 + 0.2j, 0.2, 0.7j),
        (0.3, 1.3, 0.4, 0.6),
        (0.25, 1.0, 0.5, 0.6),
        (0.3, 0.5, 0.3, 0.7 + 0.1j),  # b = q: both forms agree
    ]
    for q, a, b, z in cases:
        ctx = QContext(q)
        series = psi_series(SeriesSpec.psi([a], [b]), ctx, z).value
        prod = ramanujan_product(a, b, ctx, z).value
        good = ramanujan_theta_form(a, b, ctx, z).value
        k = pochhammer_ratio([b / a, q], [b, q / a], ctx)
        other = k * theta_ratio(-a * z, -z, ctx) * phi_series(SeriesSpec.phi([a], []), ctx, q / (a * z)).value
        print(f"{q:>5}{a!s:>18}{b!s:>18}{z!s:>18}{rel(series, prod):>10.1e}"
              f"{rel(series, good):>11.1e}{rel(series, other):>10.1e}")


def connection_constant() -> None:
    print("\nresummed 2psi1 vs C1 v1 + C2 v2, with and without (q a_j)/(q/a_j)")
    ctx = QContext(0.4)
    p = Psi1Params(0.7, 0.3, 0.9)
    spiral = SpiralSpec(cmath.rect(1.1, math.pi / 7), ctx)
    q = ctx.q
    for radius in (10.0, 20.0, 40.0):
        x = cmath.rect(radius, math.pi / 5)
        left = resum_2psi1(p, spiral, x).value
        full = short = 0
        for which, other in ((1, p.a2), (2, p.a1)):
            c = connection_coefficient(ConnectionCoefficientSpec(p, spiral, which), x).value
            v = v_solution(p, ctx, which, x).value
            full += c * v
            short += c / pochhammer_ratio([q * other], [q / other], ctx) * v
        print(f"  |x| = {radius:>5}: with factor {rel(left, full):.1e}, without {rel(left, short):.1e}")


if __name__ == "__main__":
    ramanujan_forms()
    connection_constant()
