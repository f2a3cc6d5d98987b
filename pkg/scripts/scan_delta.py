"""Backward conversion |S21(0)|^2 and RWA status along delta with isolation re-solved."""
import argparse

import numpy as np

from nonrecip.config import fig3_preset
from nonrecip.optimizer import objective_eval


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--panel", choices=["a", "b"], default="a")
    ap.add_argument("--lo", type=float, default=-10e3)
    ap.add_argument("--hi", type=float, default=-0.1e3)
    ap.add_argument("--points", type=int, default=41)
    args = ap.parse_args()
    base = fig3_preset(args.panel).base_design()
    print("delta_rad_s,abs2_S21_0,status")
    for dl in np.linspace(args.lo, args.hi, args.points):
        ev = objective_eval({"delta": dl}, base)
        print(f"{float(dl)!r},{ev.backward_S21!r},{ev.status}")


if __name__ == "__main__":
    main()
