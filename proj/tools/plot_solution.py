#!/usr/bin/env python3
"""Plot a solution.csv (t, x*, k*, y*) and optionally a convergence.csv.

    python3 tools/plot_solution.py sweep-demo/solution.csv --convergence sweep-demo/convergence.csv -o demo.png
"""
import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_columns(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    return {key: [float(r[key]) for r in rows] for key in rows[0]}


def step(ax, t, v, **kw):
    ax.step(t, v, where="post", **kw)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("solution")
    parser.add_argument("--convergence")
    parser.add_argument("--lower", type=float)
    parser.add_argument("--upper", type=float)
    parser.add_argument("-o", "--output", default="solution.png")
    args = parser.parse_args()

    cols = read_columns(args.solution)
    t = cols["t"]
    dims = sorted(k[1:] for k in cols if k.startswith("x"))
    panels = 2 + (1 if args.convergence else 0)
    fig, axes = plt.subplots(panels, 1, figsize=(8, 3 * panels))

    for j in dims:
        step(axes[0], t, cols["x" + j], label="x" + j)
        if "y" + j in cols:
            step(axes[0], t, cols["y" + j], label="y" + j, alpha=0.4)
        step(axes[1], t, cols["k" + j], label="k" + j)
    for level in (args.lower, args.upper):
        if level is not None:
            axes[0].axhline(level, color="k", lw=0.8, ls="--")
    axes[0].set_ylabel("state")
    axes[1].set_ylabel("regulator")
    for ax in axes[:2]:
        ax.legend(loc="best")

    if args.convergence:
        conv = read_columns(args.convergence)
        axes[2].loglog(conv["n"], conv["sup_gap"], "o-", label="sup gap")
        axes[2].loglog(conv["n"], conv["grid_gap"], "s--", label="grid gap")
        axes[2].set_xlabel("n")
        axes[2].legend(loc="best")
    else:
        axes[1].set_xlabel("t")

    fig.tight_layout()
    fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
