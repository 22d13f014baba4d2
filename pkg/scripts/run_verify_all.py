"""Run every identity sweep and print a residual table.

    python3 scripts/run_verify_all.py --seed 3 --precision 113 --out reports-113
"""

import argparse
from pathlib import Path

from qresum.verify import verify_all, write_report


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--precision", type=int, default=53)
    ap.add_argument("--tolerance", type=float)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--format", choices=["json", "csv"], default="json")
    args = ap.parse_args()

    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    print(f"{'identity':<18}{'pass':>6}{'skip':>6}{'fail':>6}{'max rel':>12}{'tol':>10}{'time':>9}")
    for report in verify_all(args.seed, args.tolerance, args.precision):
        c = report.counts
        print(f"{report.identity:<18}{c['pass']:>6}{c['skip']:>6}{c['fail']:>6}"
              f"{report.max_rel_residual:>12.2e}{report.tolerance:>10.0e}{report.wall_time:>8.2f}s")
        if args.out:
            write_report(report, args.format, args.out / f"{report.identity}.{args.format}")


if __name__ == "__main__":
    main()
