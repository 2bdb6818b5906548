#!/usr/bin/env python3
"""Dissipation-strength survey: extracted decay rate versus alpha for
each bath temperature, and the trap frequency required to reach a given
alpha (in recoil-energy units) for several chain sizes.

Usage: fig5.py --in DIR --out FILE
Inputs: sweep.csv, plan.csv
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from common import SAVEFIG_KW, apply_style, check_versions, read_artifact


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--in", dest="indir", required=True)
    ap.add_argument("--out", dest="out", required=True)
    args = ap.parse_args()
    indir = Path(args.indir)

    sweep_meta, sweep = read_artifact(indir / "sweep.csv")
    plan_meta, plan = read_artifact(indir / "plan.csv")
    check_versions(sweep_meta, plan_meta)

    apply_style()
    fig, (ax_rate, ax_plan) = plt.subplots(1, 2)

    for i, T in enumerate(np.unique(sweep["T"])):
        sel = sweep["T"] == T
        order = np.argsort(sweep["alpha"][sel])
        ax_rate.plot(sweep["alpha"][sel][order], sweep["gamma"][sel][order],
                     "o-", color=f"C{i}", ms=3,
                     label=rf"$T = {T:g}\,\omega_z$")
    ax_rate.set_yscale("log")
    ax_rate.set_xlabel(r"$\alpha$")
    ax_rate.set_ylabel(r"$\Gamma / \omega_z$")
    ax_rate.legend(fontsize=8)

    for i, n in enumerate(np.unique(plan["N"])):
        sel = plan["N"] == n
        order = np.argsort(plan["alpha"][sel])
        ax_plan.plot(plan["alpha"][sel][order],
                     plan["omega_z_over_ER"][sel][order],
                     "s-", color=f"C{i}", ms=3, label=rf"$N = {int(n)}$")
    ax_plan.set_xscale("log")
    ax_plan.set_yscale("log")
    ax_plan.set_xlabel(r"$\alpha$")
    ax_plan.set_ylabel(r"$\omega_z / E_R$")
    ax_plan.legend(fontsize=8)

    fig.savefig(args.out, **SAVEFIG_KW)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
