"""Shared helpers for the figure scripts.

The scripts consume only the CSV/key=value artifacts written by the
`spinbath` CLI; every input carries a format_version header that must
match across the files of one figure job.
"""

import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

EXPECTED_VERSION = "1"
SAVEFIG_KW = dict(dpi=150, metadata={"Software": "spinbath-figures"})


def fail(message: str) -> None:
    print(f"error: {message}", file=sys.stderr)
    sys.exit(1)


def read_artifact(path):
    """Parse one artifact: (meta, columns) with columns as name->array.

    meta carries the '#' header assignments (format_version, command and
    the config.* echo).  Non-numeric columns come back as object arrays.
    """
    path = Path(path)
    if not path.is_file():
        fail(f"missing input file {path}")
    meta, header, rows = {}, None, []
    for raw in path.read_text().splitlines():
        if not raw.strip():
            continue
        if raw.startswith("#"):
            body = raw[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
            continue
        cells = raw.split(",")
        if header is None:
            header = cells
            continue
        rows.append(cells)
    if header is None:
        fail(f"{path}: no column header")
    columns = {}
    for j, name in enumerate(header):
        raw_col = [r[j] for r in rows]
        try:
            columns[name] = np.array([float(x) for x in raw_col])
        except ValueError:
            columns[name] = np.array(raw_col, dtype=object)
    return meta, columns


def read_keyvalues(path):
    path = Path(path)
    if not path.is_file():
        fail(f"missing input file {path}")
    meta, values = {}, {}
    for raw in path.read_text().splitlines():
        if not raw.strip():
            continue
        target = meta if raw.startswith("#") else values
        body = raw[1:].strip() if raw.startswith("#") else raw.strip()
        if "=" in body:
            key, value = body.split("=", 1)
            target[key.strip()] = value.strip()
    return meta, values


def check_versions(*metas) -> None:
    versions = {m.get("format_version") for m in metas}
    if versions != {EXPECTED_VERSION}:
        fail(f"format version mismatch: found {sorted(versions)}, "
             f"expected {{{EXPECTED_VERSION!r}}}")


def apply_style() -> None:
    plt.rcParams.update({
        "figure.figsize": (7.0, 3.2),
        "font.size": 9,
        "axes.labelsize": 10,
        "lines.linewidth": 1.2,
        "legend.frameon": False,
        "savefig.bbox": "tight",
    })
