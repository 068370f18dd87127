#!/usr/bin/env python3
"""Plot the correlation and scatter CSVs of a `routescape walk` output directory."""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def read_summary(path):
    summary = {}
    for line in path.read_text().splitlines():
        key, sep, value = line.partition(" = ")
        if sep:
            summary[key] = value
    return summary


def plot_correlation(run, ax, summary):
    corr = pd.read_csv(run / "correlation.csv")
    per_walk = pd.read_csv(run / "correlation_per_walk.csv")
    for _, walk in per_walk.groupby("walk"):
        ax.plot(walk["lag"], walk["r"], color="0.8", linewidth=0.8)
    ax.plot(corr["lag"], corr["r"], color="C0", marker=".", label="pooled")
    band = float(summary.get("noise_band", "nan"))
    ax.axhspan(-band, band, color="C1", alpha=0.15, label="noise band")
    ax.axhline(0.0, color="k", linewidth=0.5)
    ax.set_xlabel("lag s")
    ax.set_ylabel("r(s)")
    ax.set_title(f"autocorrelation ({summary.get('autocorr_shape', '?')})")
    ax.legend()


def plot_scatter(run, ax, summary, per_walk):
    if per_walk:
        data = pd.read_csv(run / "scatter_per_walk.csv")
        x = data["hamming_distance_to_walk_best"]
        label = "distance to walk best"
    else:
        data = pd.read_csv(run / "scatter.csv")
        x = data["hamming_distance_to_best"]
        label = "distance to best"
    ax.scatter(x, data["fitness_seconds"], s=4, alpha=0.4)
    ax.set_xlabel(label)
    ax.set_ylabel("mean delay [s]")
    ax.set_title(f"fitness vs distance (fdc {float(summary.get('fdc', 'nan')):.3f})")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("run", type=Path, help="output directory of `routescape walk`")
    parser.add_argument("-o", "--output", type=Path, help="image file (default <run>/landscape.png)")
    parser.add_argument("--per-walk", action="store_true", help="scatter against each walk's own best")
    args = parser.parse_args()

    summary = read_summary(args.run / "summary.txt")
    fig, (left, right) = plt.subplots(1, 2, figsize=(11, 4))
    plot_correlation(args.run, left, summary)
    plot_scatter(args.run, right, summary, args.per_walk)
    fig.suptitle(summary.get("scenario", args.run.name))
    fig.tight_layout()
    out = args.output or args.run / "landscape.png"
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    main()
