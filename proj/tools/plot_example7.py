#!/usr/bin/env python3
"""Plot stationary-point branches from `lagr plot-data` output.

    lagr plot-data --output branches.csv
    python3 tools/plot_example7.py branches.csv -o branches.png
"""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

LABELS = {
    "x1_global_min": "global minimum",
    "x2_local_max": "local maximum",
    "x3_local_min": "local minimum",
}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv")
    ap.add_argument("-o", "--output", default="branches.png")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    fig, ax = plt.subplots(figsize=(6, 4))
    for col, label in LABELS.items():
        ax.plot(df["z"], df[col], marker=".", label=label)
    ax.set_xscale("log")
    ax.set_xlabel("z")
    ax.set_ylabel("x")
    ax.set_ylim(0, 1)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
