"""Time generate_apply for n = 2^lo .. 2^hi and print t / (n log2 n).

Seed-independent power tables are filled by one untimed call per size,
then the best of ``--reps`` timed calls is reported.
"""
import argparse
import math
import time

import numpy as np

from explicit_jl import BitString, generate_apply, plan_build, tape_partition


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.99)
    ap.add_argument("--delta", type=float, default=0.99)
    ap.add_argument("--lo", type=int, default=12)
    ap.add_argument("--hi", type=int, default=20)
    ap.add_argument("--reps", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    ratios = []
    print("log2n  t  s_stage   s_out  k_cw  ms        ns/(n log n)")
    for L in range(args.lo, args.hi + 1):
        n = 1 << L
        plan = plan_build(n, args.eps, args.delta)
        tape = tape_partition(plan, BitString.random(plan.seed_length_bits, rng))
        w = rng.standard_normal(n)
        generate_apply(plan, tape, w)
        best = math.inf
        for _ in range(args.reps):
            t0 = time.perf_counter()
            generate_apply(plan, tape, w)
            best = min(best, time.perf_counter() - t0)
        r = best / (n * L)
        ratios.append(r)
        s = plan.stages[0].s_stage if plan.stages else "-"
        print(f"{L:<6} {plan.t:<2} {s!s:<9} {plan.s_out:<6} {plan.tail.k_cw:<5} "
              f"{best * 1e3:<9.2f} {r * 1e9:.1f}")
    print(f"spread max/min = {max(ratios) / min(ratios):.2f} (a factor-2 band allows 4)")


if __name__ == "__main__":
    main()
