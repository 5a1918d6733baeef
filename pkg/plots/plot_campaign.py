#!/usr/bin/env python3
"""Render a histogram of per-trial minimum bound slack from a campaign
JSON report.

Asserts that the report records zero violations (unless --allow-violations
is given) and emits slack_hist.png in the output directory.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
from plotlib import fail, read_campaign


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("report")
    ap.add_argument("out_dir")
    ap.add_argument("--allow-violations", action="store_true")
    args = ap.parse_args()

    doc = read_campaign(args.report)
    summary = doc["summary"]
    if not args.allow_violations and summary.get("violations", 0) != 0:
        fail(f"campaign reports {summary['violations']} violations")

    slacks = [trial["residuals"]["main_bound"] for trial in doc["trials"]
              if "main_bound" in trial.get("residuals", {})
              and trial["residuals"]["main_bound"] is not None]
    if not slacks:
        fail("no main-bound slack values in report")

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    fig, axis = plt.subplots(figsize=(7, 4))
    axis.hist(slacks, bins=60, color="tab:blue")
    axis.axvline(0.0, color="k", lw=0.8)
    axis.set_xlabel("per-trial minimum slack")
    axis.set_ylabel("trials")
    axis.set_title(f"Bound slack over {len(slacks)} trials")
    fig.tight_layout()
    fig.savefig(out / "slack_hist.png", dpi=120)
    plt.close(fig)

    print(f"wrote {out / 'slack_hist.png'} ({len(slacks)} trials, "
          f"min slack {min(slacks):.3e})")


if __name__ == "__main__":
    main()
