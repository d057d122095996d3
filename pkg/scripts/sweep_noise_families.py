"""Gamma against noise amplitude for white and flicker noise at several wire distances,
plus the flicker exponent sweep at both reference-frequency choices.

    python scripts/sweep_noise_families.py --out results/sweeps
"""
import argparse
import os

from sgnoise import sweeps
from sgnoise.physics import table1_params
from sgnoise.sweeps import Axis, SweepSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/sweeps")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    base = table1_params()
    d_axis = Axis("d", 10e-6, 80e-6, 4)

    white = SweepSpec((d_axis, Axis("A", 1e-8, 1e-5, 13)), base, A=1.0)
    flick = SweepSpec((d_axis, Axis("K", 1e-16, 1e-12, 13)), base, K=1.0)
    for name, spec in (("white", white), ("flicker", flick)):
        t = sweeps.run_sweep(spec, args.workers)
        sweeps.write_csv(t, os.path.join(args.out, f"gamma_vs_{name}.csv"))
        print(f"{name}: {len(t.rows)} rows, {len(t.ok().rows)} ok")

    # 1/f^alpha at fixed K: the reference frequency sets how strongly alpha matters
    for ref in (1.0, "omega0"):
        spec = SweepSpec((Axis("alpha", 0.5, 1.5, 11, "linear"),), base, K=7e-14, flicker_omega_ref=ref)
        t = sweeps.run_sweep(spec)
        g = t.column("gamma_flicker")
        tag = "omega0" if ref == "omega0" else "1rad"
        sweeps.write_csv(t, os.path.join(args.out, f"gamma_vs_alpha_ref_{tag}.csv"))
        print(f"alpha sweep (omega_ref = {ref}): gamma {g[0]:.4g} -> {g[-1]:.4g} s^-1")


if __name__ == "__main__":
    main()
