#!/usr/bin/env python3
"""Render v_H(t), a_H(t) with the +/- sigma_Hdot band, and the slack trace
from a kinematics CSV.

Emits kinematics.png and slack.png in the output directory.  Optional
flags assert numeric claims about the data before plotting; any failed
assertion exits nonzero and writes no figures.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
from plotlib import GEOMETRY_COLUMNS, column, fail, read_rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    ap.add_argument("out_dir")
    ap.add_argument("--assert-saturation", action="store_true",
                    help="require max|a_H - sigma_Hdot| <= 1e-5 "
                         "(a_H pinned to the upper band edge)")
    ap.add_argument("--assert-flat-speed", action="store_true",
                    help="require the v_H range to be < 1e-9")
    args = ap.parse_args()

    rows = read_rows(args.csv, GEOMETRY_COLUMNS)
    t = column(rows, "t")
    v = column(rows, "v_H")
    a = column(rows, "a_H_analytic")
    sig = column(rows, "sigma_Hdot")
    slack = column(rows, "main_slack")

    if args.assert_saturation:
        if any(x is None for x in a):
            fail("saturation assertion on a CSV with degenerate points")
        worst = max(abs(ai - si) for ai, si in zip(a, sig))
        if worst > 1e-5:
            fail(f"saturation assertion failed: max|a_H - sigma_Hdot| = {worst:.3e}")
    if args.assert_flat_speed:
        spread = max(v) - min(v)
        if spread >= 1e-9:
            fail(f"flat-speed assertion failed: v_H range = {spread:.3e}")

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(t, v, label="$v_H$", color="tab:blue")
    ax.fill_between(t, [-s for s in sig], sig, alpha=0.15,
                    color="tab:orange", label=r"$\pm\sigma_{\dot H}$")
    pts = [(ti, ai) for ti, ai in zip(t, a) if ai is not None]
    if pts:
        ax.plot(*zip(*pts), label="$a_H$", color="tab:red")
    ax.set_xlabel("t")
    ax.legend()
    ax.set_title("Kinematics")
    fig.tight_layout()
    fig.savefig(out / "kinematics.png", dpi=120)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(t, slack, color="tab:green")
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\sigma_{\dot H}^2 - a_H^2$")
    ax.set_title("Bound slack")
    fig.tight_layout()
    fig.savefig(out / "slack.png", dpi=120)
    plt.close(fig)

    print(f"wrote {out / 'kinematics.png'} and {out / 'slack.png'}")


if __name__ == "__main__":
    main()
