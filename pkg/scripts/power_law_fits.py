"""log10 Gamma fits against amplitude, and the fit intercept against wire distance.

    python scripts/power_law_fits.py --out results/fits
"""
import argparse
import dataclasses
import json
import os

from sgnoise import sweeps
from sgnoise.physics import table1_params


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/fits")
    ap.add_argument("--d", type=float, nargs="+", default=[10e-6, 20e-6, 40e-6, 80e-6])
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    base = table1_params()
    summary = {}
    for fam in ("white", "flicker"):
        amp = sweeps.amplitude_fit(fam, base.d, base)
        dfit = sweeps.intercept_vs_distance(fam, args.d, base)
        summary[fam] = {
            "amplitude_fit": dataclasses.asdict(amp),
            "intercepts": dict(zip(map(str, dfit.d), dfit.intercepts)),
            "intercept_vs_log10_d": dataclasses.asdict(dfit.fit),
        }
        print(
            f"{fam:8s} log10 G = {amp.slope:.4f} log10 x + {amp.intercept:.5f}   "
            f"c(d) = {dfit.fit.slope:.4f} log10 d + {dfit.fit.intercept:.5f}"
        )
    with open(os.path.join(args.out, "fits.json"), "w") as fh:
        json.dump(summary, fh, indent=2)


if __name__ == "__main__":
    main()
