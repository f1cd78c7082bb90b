#!/usr/bin/env python3
"""Quick-look plots for orchard-duo output directories.

    plot_outputs.py <out_dir> [--save file.png]

Picks the plot from whatever the directory holds: trajectory.csv,
prcc.csv + histogram.csv, or ga_trace.csv.
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd


def plot_trajectory(df, fig):
    axes = fig.subplots(2, 2, sharex=True)
    for row, orchard in enumerate(("1", "2")):
        ax = axes[row][0]
        for comp in ("S", "A", "I", "R"):
            ax.plot(df["t"], df[f"{comp}{orchard}t"], label=comp)
        ax.set_ylabel(f"orchard {orchard} trees")
        ax.legend()
        ax = axes[row][1]
        ax.plot(df["t"], df[f"S{orchard}v"], label="S_v")
        ax.plot(df["t"], df[f"I{orchard}v"], label="I_v")
        ax.set_ylabel(f"orchard {orchard} psyllids")
        ax.legend()
    for ax in axes[1]:
        ax.set_xlabel("months")


def plot_sensitivity(prcc, hist, fig):
    left, right = fig.subplots(1, 2)
    left.bar(prcc["parameter"], prcc["prcc"])
    left.axhline(0.0, color="black", linewidth=0.8)
    left.set_ylim(-1, 1)
    left.set_ylabel("PRCC with global R0")
    right.bar(hist["lower"], hist["count"], width=hist["upper"] - hist["lower"], align="edge")
    right.set_xlabel("global R0")
    right.set_ylabel("samples")


def plot_ga(df, fig):
    top, bottom = fig.subplots(2, 1, sharex=True)
    top.plot(df["generation"], df["r1_final"], label="R1(inf)")
    top.plot(df["generation"], df["r2_final"], label="R2(inf)")
    top.set_ylabel("rogued trees")
    top.legend()
    bottom.plot(df["generation"], df["cost"], label="cost")
    bottom.plot(df["generation"], df["objective_j"], label="J")
    bottom.set_xlabel("generation")
    bottom.legend()


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("out_dir", type=Path)
    parser.add_argument("--save", type=Path)
    args = parser.parse_args()

    d = args.out_dir
    fig = plt.figure(figsize=(11, 7))
    if (d / "trajectory.csv").exists():
        plot_trajectory(pd.read_csv(d / "trajectory.csv"), fig)
    elif (d / "prcc.csv").exists():
        plot_sensitivity(pd.read_csv(d / "prcc.csv"), pd.read_csv(d / "histogram.csv"), fig)
    elif (d / "ga_trace.csv").exists():
        plot_ga(pd.read_csv(d / "ga_trace.csv"), fig)
    else:
        parser.error(f"nothing to plot in {d}")
    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=120)
    else:
        plt.show()


if __name__ == "__main__":
    main()
