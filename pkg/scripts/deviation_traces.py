"""Noise-driven arm deviations over several loops, and whether the arms still close.

Writes one trace CSV per noise family (t, delta_eta, dx_R, dx_L, dp_R, dp_L)
at the bounds that give coherence 0.1 after one loop.

    python scripts/deviation_traces.py --out results/traces --seed 0
"""
import argparse
import math
import os

import numpy as np

from sgnoise import dephasing, stochastic
from sgnoise.physics import derive_quantities, table1_params
from sgnoise.spectra import Flicker, White


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/traces")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--loops", type=int, default=8)
    ap.add_argument("--mc", type=int, default=500)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    p = table1_params()
    dq = derive_quantities(p)
    g = math.log(10) / dq.T_exp
    A = dephasing.bound_white(g, dq)
    K = dephasing.bound_flicker(g, dq, Flicker.from_params(1.0, p))
    grid = stochastic.SimulationGrid.for_loops(dq, 256, args.loops, seed=args.seed)
    for spec in (White(A), Flicker.from_params(K, p)):
        name = type(spec).__name__.lower()
        real = stochastic.synthesize_noise(spec, grid, 0, omega_min=dq.omega0)
        dev = stochastic.deviations(real, dq, p)
        stochastic.write_trace_csv(os.path.join(args.out, f"trace_{name}.csv"), real, dev)
        c = stochastic.contrast_single(dev, dq, dq.T_exp)
        e = stochastic.contrast_ensemble(spec, dq, p, args.mc, dq.T_exp, grid)
        print(
            f"{name:8s} max|dx| = {np.abs(dev.delta_x).max():.3e} m  "
            f"contrast single = {c.contrast:.6f}  ensemble = {e.contrast:.6f}"
        )


if __name__ == "__main__":
    main()
