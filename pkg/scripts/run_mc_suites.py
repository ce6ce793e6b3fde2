#!/usr/bin/env python3
"""Run the four Monte Carlo verification suites and print one verdict per line.

For quick smoke runs use --samples 2000; the defaults take a minute or so.
"""

import argparse

import numpy as np

from transversal import (
    McConfig,
    cube_complement,
    mc_bad_set_measure,
    mc_det_lower_bound,
    mc_inverse_bound,
    random_subspace_family,
    translation_experiment,
)
from transversal.prevalence import _keyed_rng, sample_ball
from transversal.separator import SubspaceFamily


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--samples", type=int, default=20_000)
    args = ap.parse_args()
    seed = args.seed
    cfg = McConfig(samples=args.samples, seed=seed)

    fam = random_subspace_family(seed + 100, 4, 1, 50)
    verdicts = {}
    for eps in cfg.epsilon_grid:
        rep = mc_bad_set_measure(fam, eps, cfg)
        verdicts[f"badset eps={eps:g}"] = rep.verdict

    rng = _keyed_rng(seed, 999)
    shifts = sample_ball(rng, 20 * 2, 2).reshape(20, 2, 2)
    rep, _ = mc_det_lower_bound(list(shifts), cfg)
    verdicts["det lower bound"] = rep.verdict

    delta = 1.0 / np.arange(1, 21, dtype=float)
    rep, _ = mc_inverse_bound(list(shifts), delta, cfg)
    verdicts["inverse bound"] = rep.verdict

    toy = SubspaceFamily.from_normals(
        [np.array([[0.05 * j, 1.0]]) / np.hypot(0.05 * j, 1.0)
         for j in range(1, 4)])
    base = cube_complement(toy, seed + 1)
    small = McConfig(samples=max(1000, args.samples // 20), seed=seed)
    rep, _ = translation_experiment(base, toy, np.array([[1.0, 0.0]]), small)
    verdicts["translation stability"] = rep.verdict

    width = max(len(k) for k in verdicts)
    for name, verdict in verdicts.items():
        print(f"{name:<{width}}  {'ok' if verdict else 'FAILED'}")
    if not all(verdicts.values()):
        raise SystemExit(1)


if __name__ == "__main__":
    main()
