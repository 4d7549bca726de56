"""Local search for vectors that stay peaked after a random H D(x) layer.

Maximises the average of ||H D(x) w||_inf / ||w|| over a fixed batch of
i.i.d. sign vectors, with integer entries in [-3, 3], by greedy
coordinate moves. Writes src/explicit_jl/data/adversarial.json.
"""
import argparse
import json
from pathlib import Path

import numpy as np

from explicit_jl.hadamard import fwht

OUT = Path(__file__).resolve().parents[1] / "src" / "explicit_jl" / "data" / "adversarial.json"


def objective(w, signs):
    nrm = np.linalg.norm(w)
    if nrm == 0:
        return -np.inf
    return np.abs(fwht(signs * w)).max(axis=1).mean() / nrm


def search(n, draws=256, passes=3, seed=0):
    rng = np.random.default_rng(seed + n)
    signs = rng.choice([-1.0, 1.0], size=(draws, n))
    w = rng.integers(-3, 4, size=n).astype(float)
    best = objective(w, signs)
    for _ in range(passes):
        improved = False
        for j in rng.permutation(n):
            keep = w[j]
            for val in range(-3, 4):
                w[j] = val
                score = objective(w, signs)
                if score > best + 1e-12:
                    best, keep, improved = score, val, True
            w[j] = keep
        if not improved:
            break
    return w.astype(int).tolist(), best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", type=int, nargs="+", default=[8, 16, 64, 256])
    args = ap.parse_args()
    vectors, scores = {}, {}
    for n in args.dims:
        vectors[str(n)], scores[str(n)] = search(n)
        print(f"n={n}: mean linf ratio {scores[str(n)]:.4f}")
    doc = {"objective": "mean ||H D(x) w||_inf / ||w|| over 256 iid sign draws",
           "scores": scores, "vectors": vectors}
    OUT.write_text(json.dumps(doc, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
