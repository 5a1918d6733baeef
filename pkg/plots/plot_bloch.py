#!/usr/bin/env python3
"""Render the 3-D Bloch-sphere trace from a qubit CSV.

Requires the Bloch columns (ax, ay, az, ...).  Asserts that the Bloch
vector stays on the unit sphere (max | ||a|| - 1 | <= 1e-6) before
plotting; emits bloch.png in the output directory.
"""

import argparse
import math
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
from plotlib import BLOCH_COLUMNS, GEOMETRY_COLUMNS, column, fail, read_rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    ap.add_argument("out_dir")
    args = ap.parse_args()

    rows = read_rows(args.csv, GEOMETRY_COLUMNS + BLOCH_COLUMNS)
    ax_, ay, az = column(rows, "ax"), column(rows, "ay"), column(rows, "az")

    worst = max(abs(math.sqrt(x * x + y * y + z * z) - 1.0)
                for x, y, z in zip(ax_, ay, az))
    if worst > 1e-6:
        fail(f"Bloch norm assertion failed: max | ||a|| - 1 | = {worst:.3e}")

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    fig = plt.figure(figsize=(6, 6))
    axis = fig.add_subplot(projection="3d")
    axis.plot(ax_, ay, az, color="tab:blue", lw=1.2)
    axis.scatter([ax_[0]], [ay[0]], [az[0]], color="tab:green", label="start")
    axis.scatter([ax_[-1]], [ay[-1]], [az[-1]], color="tab:red", label="end")
    axis.set_xlim(-1, 1)
    axis.set_ylim(-1, 1)
    axis.set_zlim(-1, 1)
    axis.set_box_aspect((1, 1, 1))
    axis.set_title("Bloch trajectory")
    axis.legend()
    fig.savefig(out / "bloch.png", dpi=120)
    plt.close(fig)

    print(f"wrote {out / 'bloch.png'} (max norm deviation {worst:.3e})")


if __name__ == "__main__":
    main()
