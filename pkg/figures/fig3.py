#!/usr/bin/env python3
"""High-temperature transition: underdamped vs overdamped polarization
traces with their memory kernels, including the revival of the spin
after the bath round-trip time.

Usage: fig3.py --in DIR --out FILE
Inputs: p_underdamped.csv, p_overdamped.csv, kernel_underdamped.csv,
        kernel_overdamped.csv, report_underdamped.txt
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt

from common import (SAVEFIG_KW, apply_style, check_versions, read_artifact,
                    read_keyvalues)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--in", dest="indir", required=True)
    ap.add_argument("--out", dest="out", required=True)
    args = ap.parse_args()
    indir = Path(args.indir)

    traces, kernels, metas = {}, {}, []
    for tag in ("underdamped", "overdamped"):
        meta_p, p = read_artifact(indir / f"p_{tag}.csv")
        meta_k, k = read_artifact(indir / f"kernel_{tag}.csv")
        metas += [meta_p, meta_k]
        traces[tag] = (p, meta_p)
        kernels[tag] = (k, meta_k)
    rep_meta, report = read_keyvalues(indir / "report_underdamped.txt")
    metas.append(rep_meta)
    check_versions(*metas)

    apply_style()
    fig, (ax_p, ax_k) = plt.subplots(1, 2)

    styles = {"underdamped": dict(color="C0", lw=1.6),
              "overdamped": dict(color="C3", lw=1.0)}
    for tag, (cols, meta) in traces.items():
        delta = float(meta["config.laser.delta"])
        alpha = float(meta["config.laser.alpha_target"])
        ax_p.plot(cols["t"], cols["P"],
                  label=rf"$\Delta={delta:g}\,\omega_z,\ \alpha={alpha:g}$",
                  **styles[tag])
    horizon = float(report["revival_horizon"])
    ax_p.axvline(horizon, color="0.6", ls=":", lw=1)
    ax_p.set_xlabel(r"$t\,\omega_z$")
    ax_p.set_ylabel(r"$P(t)$")
    ax_p.legend(loc="upper right", fontsize=8)

    for tag, (cols, meta) in kernels.items():
        delta = float(meta["config.laser.delta"])
        ax_k.plot(cols["tau"], cols["K"] / delta ** 2, **styles[tag])
    ax_k.set_xlabel(r"$\tau\,\omega_z$")
    ax_k.set_ylabel(r"$K(\tau) / \Delta^2$")
    ax_k.set_xlim(0, 2.0 * horizon)

    fig.savefig(args.out, **SAVEFIG_KW)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
