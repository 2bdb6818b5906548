#!/usr/bin/env python3
"""Zero-temperature localization crossover: polarization traces for a
set of dissipation strengths alpha.

Usage: fig4.py --in DIR --out FILE
Inputs: every p_alpha_*.csv in DIR
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt

from common import SAVEFIG_KW, apply_style, check_versions, fail, read_artifact


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--in", dest="indir", required=True)
    ap.add_argument("--out", dest="out", required=True)
    args = ap.parse_args()
    indir = Path(args.indir)

    paths = sorted(indir.glob("p_alpha_*.csv"))
    if not paths:
        fail(f"no p_alpha_*.csv traces in {indir}")
    loaded = []
    for path in paths:
        meta, cols = read_artifact(path)
        loaded.append((float(meta["config.laser.alpha_target"]), meta, cols))
    loaded.sort(key=lambda item: item[0])
    check_versions(*[meta for _, meta, _ in loaded])

    apply_style()
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    for i, (alpha, meta, cols) in enumerate(loaded):
        ax.plot(cols["t"], cols["P"], color=f"C{i}",
                label=rf"$\alpha = {alpha:g}$")
    ax.set_xlabel(r"$t\,\omega_z$")
    ax.set_ylabel(r"$P(t)$")
    ax.legend(loc="lower left", fontsize=8)

    fig.savefig(args.out, **SAVEFIG_KW)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
