"""Print formula, construction and exhaustive counts for small odd prime powers.

Usage: python3 scripts/census_table.py [--max-q 23] [--budget N] [--jobs J]
"""
import argparse

from equisums import build_context, reconcile_counts
from equisums.counting import DEFAULT_BUDGET


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-q", type=int, default=23)
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    print(f"{'q':>4} {'r':>3} {'formula':>9} {'configs':>9} {'sets':>6} {'census':>14}")
    for q in range(3, args.max_q + 1, 2):
        ctx = build_context(q)
        if not ctx.is_prime_power:
            continue
        rep = reconcile_counts(ctx, budget=args.budget, jobs=args.jobs)
        census = rep.brute_force_status if rep.brute_force_count is None else rep.brute_force_count
        print(
            f"{q:>4} {ctx.r:>3} {rep.formula_value:>9} {rep.configuration_count:>9} "
            f"{rep.distinct_set_count:>6} {census!s:>14}"
        )


if __name__ == "__main__":
    main()
