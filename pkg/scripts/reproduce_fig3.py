"""Write the forward/backward conversion sweeps for both reference parameter sets.

    python3 scripts/reproduce_fig3.py --outdir out/
"""
import argparse
import json
from pathlib import Path

from nonrecip.cli import SMATRIX_HEADER, smatrix_rows, write_csv
from nonrecip.config import fig3_preset
from nonrecip.scattering import isolation_bandwidth, smatrix


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="out")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for panel in "ab":
        cfg = fig3_preset(panel)
        d = cfg.design()
        res = smatrix(d.bare, d.frame, d.couplings, cfg.sweep.grid())
        (out / f"fig3{panel}.csv").write_text(write_csv(SMATRIX_HEADER, smatrix_rows(res)))
        bw, peak = isolation_bandwidth(res)
        i0 = res.at(0.0)
        summary[panel] = {"abs2_S12_0": float(res.abs2("S12")[i0]),
                          "abs2_S21_0": float(res.abs2("S21")[i0]),
                          "bandwidth_20dB": bw, "V_mag": d.drives.V_mag, "phi_X": d.drives.phi_X}
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
