"""Monte-Carlo phase variance over one loop against the analytic dephasing rate.

The analytic Gamma equals 2 pi Var(delta phi); the script prints both
normalisations so the factor is visible.

    python scripts/phase_variance_check.py --M 2000
"""
import argparse
import math

from sgnoise import dephasing, stochastic
from sgnoise.physics import derive_quantities, table1_params
from sgnoise.spectra import Flicker, White


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--M", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=11)
    args = ap.parse_args()
    p = table1_params()
    dq = derive_quantities(p)
    g = math.log(10) / dq.T_exp
    A = dephasing.bound_white(g, dq)
    K = dephasing.bound_flicker(g, dq, Flicker.from_params(1.0, p))
    grid = stochastic.SimulationGrid.for_loops(dq, 256, 8, seed=args.seed)
    for spec in (White(A), Flicker.from_params(K, p)):
        ref = dephasing.gamma(spec, dq).gamma
        r = stochastic.phase_variance_mc(spec, dq, p, args.M, grid)
        z = (r.gamma - ref) / r.se_gamma
        print(
            f"{type(spec).__name__:8s} analytic {ref:.2f}  MC 2pi Var {r.gamma:.2f} +- {r.se_gamma:.2f} "
            f"(z = {z:+.2f})  Var/T {r.rate:.1f} s^-1"
        )


if __name__ == "__main__":
    main()
