"""Compare the perturbative harmonics with a time-domain integration (reference set a).

Takes about a minute on one core with the half-drive scaling rerun.
"""
import argparse
import json

from nonrecip.config import fig3_preset
from nonrecip.oracle import verify_expansion


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--panel", choices=["a", "b"], default="a")
    ap.add_argument("--mode", choices=["paper-literal", "drive-shifted"], default="drive-shifted")
    ap.add_argument("--scale", type=float, default=1.0, help="drive scale for the comparison")
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--json", help="write the full comparison here")
    args = ap.parse_args()

    d = fig3_preset(args.panel).design()
    cmp = verify_expansion(d.bare, d.drives, mode=args.mode, drive_scale=args.scale, tol=args.tol)
    for r in cmp.rows:
        print(f"{r.label:>10s}  order {r.min_order}-{r.max_order}  |x| = {abs(r.measured):10.4e}"
              f"  rel err = {r.rel_err:.3e}")
    w1, wh, ratio = cmp.scaling_check
    print(f"worst: {cmp.worst_key} {cmp.worst_rel_err:.3e}")
    print(f"worst order-2 error at scale 1 / 0.5: {w1:.3e} / {wh:.3e} (ratio {ratio:.3f})")
    print(f"energy outside the catalog: {cmp.outside_energy_fraction:.2e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(cmp.to_dict(), fh, indent=2)


if __name__ == "__main__":
    main()
