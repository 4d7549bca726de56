"""Command-line interface.

Exit codes: 0 success or audit pass, 1 audit failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import audit
from .access import entry
from .corpus import function_corpus, vector_corpus
from .errors import InvalidParams, JLError, LengthMismatch
from .pipeline import MatrixHandle
from .plan import Constants, JlPlan, plan_build
from .sampler import family_build, sampler_audit
from .tape import BitString, tape_partition
from .vecio import read_vectors, write_vectors

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _constants(args) -> Constants:
    base = Constants()
    kw = {}
    for name in ("c", "c_samp", "c_k", "c_cw_dim", "c_cw_indep", "c_r", "k_schedule", "stage_cap"):
        val = getattr(args, name, None)
        if val is not None:
            kw[name] = val
    return Constants(**{**base.__dict__, **kw})


def _load_plan(path) -> JlPlan:
    try:
        return JlPlan.from_json(Path(path).read_text())
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise JLError(f"cannot read plan {path}: {exc}") from exc


def _seed(plan: JlPlan, seed_hex: str | None):
    nbytes = -(-plan.seed_length_bits // 8)
    if seed_hex is None:
        raw = bytearray(os.urandom(nbytes))
        spare = 8 * nbytes - plan.seed_length_bits
        if nbytes:
            raw[-1] &= (0xFF << spare) & 0xFF
        seed_hex = bytes(raw).hex()
        print(f"seed: {seed_hex}", file=sys.stderr)
    bits = BitString.from_hex(seed_hex)
    if bits.length != 8 * nbytes:
        raise LengthMismatch(
            f"seed has {bits.length // 8} bytes; this plan takes {nbytes} "
            f"({plan.seed_length_bits} bits)")
    if bits.value & ((1 << (bits.length - plan.seed_length_bits)) - 1):
        raise LengthMismatch("seed sets bits past the plan's seed length")
    return tape_partition(plan, bits)


def _check_hash(plan: JlPlan, file_hash: str | None, path) -> None:
    if file_hash is not None and file_hash != plan.sha256():
        raise InvalidParams(f"{path} carries plan hash {file_hash[:12]}..., "
                            f"not this plan's {plan.sha256()[:12]}...")


def schedule_table(plan: JlPlan) -> str:
    rows = [f"n = {plan.n_input}   N = {plan.N}   eps = {plan.eps}   delta = {plan.delta}",
            f"t = {plan.t} (cap {plan.t_cap})   eps_stage = {plan.eps_stage:.6g}   "
            f"delta_stage = {plan.delta_stage:.6g}   k0 = {plan.k0}",
            "stage  n_i        k_i  s_i        sampler_k  bits"]
    for st in plan.stages:
        rows.append(f"{st.index:<6} {st.n_stage:<10} {st.k:<4} {st.s_stage:<10} "
                    f"{st.sampler_k:<10} {st.sign_bits + st.sampler_bits}")
    tail = plan.tail
    rows.append(f"tail   m = {tail.m_in}   s_out = {tail.s_out}   k_cw = {tail.k_cw}   "
                f"bits = {tail.sign_bits}")
    rows.append(f"seed length r = {plan.seed_length_bits} bits "
                f"(bound {plan.seed_bound():.1f} with C_r = {plan.constants.c_r})")
    return "\n".join(rows)


def cmd_plan(args) -> int:
    plan = plan_build(args.n, args.eps, args.delta, _constants(args))
    if args.out:
        Path(args.out).write_text(plan.to_json())
    else:
        sys.stdout.write(plan.to_json())
    print(schedule_table(plan), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def cmd_embed(args) -> int:
    plan = _load_plan(args.plan)
    tape = _seed(plan, args.seed)
    try:
        vectors, file_hash = read_vectors(args.input, args.format)
    except OSError as exc:
        raise JLError(f"cannot read {args.input}: {exc}") from exc
    _check_hash(plan, file_hash, args.input)
    handle = MatrixHandle(plan, tape)
    out = []
    for i, v in enumerate(vectors):
        if v.shape[0] != plan.n_input:
            raise LengthMismatch(f"vector {i} has length {v.shape[0]}, plan expects {plan.n_input}")
        out.append(handle.apply(v))
    config = {"command": "embed", "plan": str(args.plan), "seed_hex": tape.bits.to_hex(),
              "input": str(args.input), "format": args.format}
    write_vectors(args.output, out, args.out_format or args.format, plan.sha256(), config)
    print(f"embedded {len(out)} vectors into R^{plan.s_out}")
    return EXIT_OK


def cmd_entry(args) -> int:
    plan = _load_plan(args.plan)
    tape = _seed(plan, args.seed)
    print(repr(entry(plan, tape, args.row, args.col)))
    return EXIT_OK


def cmd_audit(args) -> int:
    plan = _load_plan(args.plan)
    if args.vectors:
        vecs, file_hash = read_vectors(args.vectors, args.format)
        _check_hash(plan, file_hash, args.vectors)
        vectors = {f"vec{i}": v for i, v in enumerate(vecs)}
    else:
        vectors = vector_corpus(plan.n_input)
    rng_seed = args.rng_seed
    if rng_seed is None:
        rng_seed = os.urandom(16).hex()
        print(f"rng seed: {rng_seed}", file=sys.stderr)
    reports = audit.corpus_audit(plan, vectors, args.trials, rng_seed)
    doc = {"config": {"plan": str(args.plan), "plan_sha256": plan.sha256(),
                      "trials": args.trials, "rng_seed_hex": rng_seed},
           "reports": {k: r.to_dict() for k, r in reports.items()}}
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    if args.histogram:
        lines = ["vector,lower,upper,count"]
        for name, r in reports.items():
            for row in r.histogram_csv().splitlines()[1:]:
                lines.append(f"{name},{row}")
        Path(args.histogram).write_text("\n".join(lines) + "\n")
    ok = True
    for name, r in reports.items():
        status = "PASS" if r.passes() else "FAIL"
        ok &= r.passes()
        print(f"{status} {name}: failure rate {r.failure_rate:.4f} "
              f"(99% CI {r.ci[0]:.4f}-{r.ci[1]:.4f}), baseline {r.baseline_failure_rate:.4f}")
    if reports:
        print(f"wall time {next(iter(reports.values())).wall_time:.2f}s", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sampler_audit(args) -> int:
    fam = family_build(args.n, args.bound, args.eps, args.delta,
                       args.c_samp or 2.0, args.c_k or 2.0)
    exhaustive = None if args.samples is None else False
    ok = True
    print(f"family: n={fam.n} s={fam.s} k={fam.k} index_bits={fam.index_bits}")
    for name, f in function_corpus(fam.n, args.bound).items():
        rate = sampler_audit(fam, f, exhaustive=exhaustive, samples=args.samples or 100_000)
        ok &= rate <= args.delta
        print(f"{'PASS' if rate <= args.delta else 'FAIL'} {name}: failure fraction {rate:.6f}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_regularity_audit(args) -> int:
    if args.vectors:
        vecs, _ = read_vectors(args.vectors)
        vectors = {f"vec{i}": v for i, v in enumerate(vecs)}
    else:
        corpus = vector_corpus(args.n)
        vectors = {args.vector: corpus[args.vector]} if args.vector else corpus
    bound = audit.regularity_bound(args.n, args.k, args.alpha)
    ok = True
    for name, w in vectors.items():
        rate = audit.regularity_audit(args.n, args.k, w, args.alpha)
        good = bound > 1 or rate <= bound
        ok &= good
        print(f"{'PASS' if good else 'FAIL'} {name}: exceed rate {rate:.6f} (bound {bound:.6g})")
    return EXIT_OK if ok else EXIT_FAIL


def _add_constants(p):
    g = p.add_argument_group("constants")
    g.add_argument("--c", type=float)
    g.add_argument("--c-samp", dest="c_samp", type=float)
    g.add_argument("--c-k", dest="c_k", type=float)
    g.add_argument("--c-cw-dim", dest="c_cw_dim", type=float)
    g.add_argument("--c-cw-indep", dest="c_cw_indep", type=float)
    g.add_argument("--c-r", dest="c_r", type=float)
    g.add_argument("--k-schedule", choices=["geometric", "literal"])
    g.add_argument("--stage-cap", choices=["loglog", "none"])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="explicit-jl", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="build and write a parameter plan")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--out", help="plan file (default: stdout)")
    _add_constants(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("embed", help="apply G(y) to every vector in a file")
    p.add_argument("--plan", required=True)
    p.add_argument("--seed", help="seed as hex; drawn and printed if omitted")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=["binary", "csv"])
    p.add_argument("--out-format", choices=["binary", "csv"])
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("entry", help="print one entry G(y)[row, col]")
    p.add_argument("--plan", required=True)
    p.add_argument("--seed")
    p.add_argument("--row", type=int, required=True)
    p.add_argument("--col", type=int, required=True)
    p.set_defaults(func=cmd_entry)

    p = sub.add_parser("audit", help="Monte Carlo distortion audit")
    p.add_argument("--plan", required=True)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--corpus", action="store_true", help="use the built-in corpus (default)")
    src.add_argument("--vectors")
    p.add_argument("--format", choices=["binary", "csv"])
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--rng-seed")
    p.add_argument("--report")
    p.add_argument("--histogram")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("sampler-audit", help="audit a sampler family over the function corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bound", type=float, default=1.0)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--c-samp", dest="c_samp", type=float)
    p.add_argument("--c-k", dest="c_k", type=float)
    p.add_argument("--samples", type=int, help="sample members instead of enumerating")
    p.set_defaults(func=cmd_sampler_audit)

    p = sub.add_parser("regularity-audit", help="linf regularisation after H D(x)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.125)
    p.add_argument("--vector", help="corpus vector name (default: whole corpus)")
    p.add_argument("--vectors")
    p.set_defaults(func=cmd_regularity_audit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except JLError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
