#!/usr/bin/env python3
"""Phonon bath overview: axial spectrum with its closed-form estimate,
and the binned spectral density for both laser drives with the
continuum curves overlaid (dashed).

Usage: fig2.py --in DIR --out FILE
Inputs: modes.csv, dispersion.csv, jspec_tw.csv, jspec_sw.csv,
        jspec_tw_fit.txt, jspec_sw_fit.txt
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from common import (SAVEFIG_KW, apply_style, check_versions, read_artifact,
                    read_keyvalues)


def step_xy(lo, hi, heights):
    x = np.empty(2 * len(lo))
    y = np.empty(2 * len(lo))
    x[0::2], x[1::2] = lo, hi
    y[0::2], y[1::2] = heights, heights
    return x, y


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--in", dest="indir", required=True)
    ap.add_argument("--out", dest="out", required=True)
    args = ap.parse_args()
    indir = Path(args.indir)

    modes_meta, modes = read_artifact(indir / "modes.csv")
    disp_meta, disp = read_artifact(indir / "dispersion.csv")
    tw_meta, tw = read_artifact(indir / "jspec_tw.csv")
    sw_meta, sw = read_artifact(indir / "jspec_sw.csv")
    tw_fit_meta, tw_fit = read_keyvalues(indir / "jspec_tw_fit.txt")
    sw_fit_meta, sw_fit = read_keyvalues(indir / "jspec_sw_fit.txt")
    check_versions(modes_meta, disp_meta, tw_meta, sw_meta,
                   tw_fit_meta, sw_fit_meta)

    apply_style()
    fig, (ax_spec, ax_j) = plt.subplots(1, 2)

    ax_spec.plot(modes["n"], modes["omega_n"], "o", ms=3, color="C0",
                 label="exact")
    ax_spec.plot(disp["n"], disp["omega_estimate"], "-", color="C1",
                 label="uniform-chain estimate")
    ax_spec.set_xlabel("mode index n")
    ax_spec.set_ylabel(r"$\omega_n / \omega_z$")
    ax_spec.legend(loc="upper left")

    for cols, fit, color, label in ((tw, tw_fit, "C0", "travelling wave"),
                                    (sw, sw_fit, "C3", "standing wave")):
        x, y = step_xy(cols["omega_lo"], cols["omega_hi"], cols["J"])
        pos = y > 0
        ax_j.plot(x[pos], y[pos], color=color, label=label)
        grid = np.geomspace(cols["omega_lo"][0], cols["omega_hi"][-1], 200)
        coeff = float(fit["analytic_coefficient"])
        s_nom = float(fit["s_nominal"])
        ax_j.plot(grid, coeff * grid ** s_nom, "--", color=color, alpha=0.8)
    ax_j.set_xscale("log")
    ax_j.set_yscale("log")
    ax_j.set_xlabel(r"$\omega / \omega_z$")
    ax_j.set_ylabel(r"$J(\omega)$")
    ax_j.legend(loc="lower left", fontsize=8)

    fig.savefig(args.out, **SAVEFIG_KW)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
