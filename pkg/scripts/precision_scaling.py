"""Main-theorem residual against working precision.

The resummed 2psi1 and C1 v1 + C2 v2 are computed independently, so their gap
should fall with the unit roundoff rather than stall at a fixed floor.
"""

import argparse
import cmath
import math
import time

from qresum.connection import main_theorem_rhs
from qresum.qcore import QContext
from qresum.resummation import Psi1Params, SpiralSpec, resum_2psi1


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bits", type=int, nargs="+", default=[53, 80, 113, 160, 200])
    ap.add_argument("--radius", type=float, default=10.0, help="|x|; the argument is pi/5")
    args = ap.parse_args()

    params = Psi1Params(0.7, 0.3, 0.9)
    lam = cmath.rect(1.1, math.pi / 7)
    x = cmath.rect(args.radius, math.pi / 5)
    print(f"{'bits':>5}{'rel residual':>15}{'2^-bits':>12}{'terms +/-':>12}{'time':>9}")
    for bits in args.bits:
        ctx = QContext(0.4, precision_bits=bits)
        spiral = SpiralSpec(lam, ctx)
        start = time.perf_counter()
        left = resum_2psi1(params, spiral, x)
        right = main_theorem_rhs(params, spiral, x)
        elapsed = time.perf_counter() - start
        rel = abs(left.value - right.value) / abs(right.value)
        print(f"{bits:>5}{float(rel):>15.2e}{2.0**-bits:>12.1e}"
              f"{f'{left.terms_used_pos}/{left.terms_used_neg}':>12}{elapsed:>8.2f}s")


if __name__ == "__main__":
    main()
