"""Shared input parsing for the plot scripts.

The scripts consume the simulator's CSV/JSON artifacts as opaque data:
they validate the documented headers, assert the numeric claims passed
on the command line, and render.  No physics is recomputed here.
"""

import csv
import json
import sys

GEOMETRY_COLUMNS = [
    "t", "s", "exp_H", "sigma_H", "v_H", "a_H_analytic", "a_H_fd",
    "sigma_Hdot", "main_slack", "kappa_LT_sq", "kappa_AC_sq", "degenerate",
]
BLOCH_COLUMNS = ["ax", "ay", "az", "mx", "my", "mz", "triple"]


def fail(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)
    raise SystemExit(1)


def read_rows(path: str, required: list[str]) -> list[dict]:
    """Read a kinematics CSV, checking the header and a non-empty body.

    Returns one dict per row with floats for numeric cells, None for
    absent (empty) cells, and bools for the `degenerate` column.
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        fail(str(exc))
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required:
            if col not in header:
                fail(f"missing column {col!r} in {path}")
        rows = []
        for raw in reader:
            row = {}
            for key, cell in raw.items():
                if key == "degenerate":
                    row[key] = cell == "true"
                elif cell == "" or cell is None:
                    row[key] = None
                else:
                    try:
                        row[key] = float(cell)
                    except ValueError:
                        fail(f"non-numeric cell {cell!r} in column {key!r}")
            rows.append(row)
    if not rows:
        fail(f"no data rows in {path}")
    return rows


def column(rows: list[dict], name: str) -> list:
    return [row[name] for row in rows]


def read_campaign(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        fail(str(exc))
    for key in ("summary", "trials"):
        if key not in doc:
            fail(f"missing key {key!r} in {path}")
    return doc
