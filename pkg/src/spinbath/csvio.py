"""Deterministic CSV and key=value artifact writers.

Every artifact starts with '#'-prefixed comment lines carrying the
format version and the full run configuration, so a file is
self-describing and byte-identical across reruns of the same config.
Floats are written with 17 significant digits (round-trip exact).
"""

from __future__ import annotations

from pathlib import Path

FORMAT_VERSION = "1"


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def header_lines(command: str, config_echo: list[str]) -> list[str]:
    lines = [f"# format_version={FORMAT_VERSION}", f"# command={command}"]
    lines += [f"# {entry}" for entry in config_echo]
    return lines


def write_csv(path: str | Path, command: str, config_echo: list[str],
              columns: list[str], rows) -> Path:
    """rows: iterable of tuples matching `columns`."""
    path = Path(path)
    out = header_lines(command, config_echo)
    out.append(",".join(columns))
    for row in rows:
        out.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(out) + "\n", newline="\n")
    return path


def write_keyvalues(path: str | Path, command: str, config_echo: list[str],
                    pairs: dict) -> Path:
    path = Path(path)
    out = header_lines(command, config_echo)
    out += [f"{key}={fmt(value)}" for key, value in pairs.items()]
    path.write_text("\n".join(out) + "\n", newline="\n")
    return path


def read_csv(path: str | Path):
    """Read back an artifact: (meta, columns, data-rows as float lists).

    meta holds the comment-header assignments (format_version, command,
    config.* echo).  Non-numeric cells are kept as strings.
    """
    meta: dict[str, str] = {}
    header: list[str] | None = None
    rows: list[list] = []
    for raw in Path(path).read_text().splitlines():
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
        parsed = []
        for cell in cells:
            try:
                parsed.append(float(cell))
            except ValueError:
                parsed.append(cell)
        rows.append(parsed)
    if header is None:
        raise ValueError(f"{path}: no header row")
    return meta, header, rows
