"""Distortion audit over the built-in corpus, side by side with i.i.d. signs.

    python scripts/distortion.py --n 256 --eps 0.5 --delta 0.1 --trials 10000
"""
import argparse

from explicit_jl.audit import corpus_audit
from explicit_jl.corpus import vector_corpus
from explicit_jl.plan import plan_build


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--eps", type=float, default=0.5)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--rng-seed", default="a3")
    args = ap.parse_args()
    plan = plan_build(args.n, args.eps, args.delta)
    print(f"n={plan.n_input} N={plan.N} t={plan.t} s_out={plan.s_out} "
          f"seed={plan.seed_length_bits} bits (i.i.d. signs need {plan.s_out * plan.n_input})")
    reports = corpus_audit(plan, vector_corpus(plan.n_input), args.trials, args.rng_seed)
    print(f"{'vector':<22}{'rate':>8}{'99% upper':>11}{'i.i.d.':>9}  verdict")
    for name, r in reports.items():
        verdict = "ok" if r.passes() and r.near_baseline() else "CHECK"
        print(f"{name:<22}{r.failure_rate:>8.4f}{r.ci[1]:>11.4f}{r.baseline_failure_rate:>9.4f}  {verdict}")


if __name__ == "__main__":
    main()
