#!/usr/bin/env python3
"""Render a qlue run directory to PNG.

Usage: plot.py RUN_DIR [--out FILE]

The experiment kind is read from RUN_DIR/report.json; data comes from
cells.csv (and points/*.csv for the non-centroidal experiment).
"""

import argparse
import csv
import json
import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_cells(run):
    with open(run / "cells.csv", newline="") as f:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(f)]


def series(cells, group, x):
    out = defaultdict(list)
    for c in cells:
        out[c[group]].append(c)
    return {g: sorted(rows, key=lambda r: r[x]) for g, rows in sorted(out.items())}


def plot_trend(cells, group, x, xlabel, label_fmt, logx=False):
    fig, ax = plt.subplots(figsize=(6, 4))
    for g, rows in series(cells, group, x).items():
        ax.errorbar(
            [r[x] for r in rows],
            [r["mean_fh"] for r in rows],
            yerr=[r["std_fh"] for r in rows],
            marker="o",
            capsize=3,
            label=label_fmt.format(g),
        )
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("homogeneity $F_H$")
    ax.set_ylim(-0.05, 1.05)
    ax.legend()
    return fig


def plot_lattice(cells):
    fig, ax = plt.subplots(figsize=(6, 4))
    rows = sorted(cells, key=lambda r: r["m"])
    m = [r["m"] for r in rows]
    for key, label in [("classical_calls", "classical scan"), ("quantum_calls", "Grover oracle calls")]:
        y = [r[key] for r in rows]
        ax.loglog(m, y, "o", label=f"{label} (slope {slope(m, y):.2f})")
    ax.loglog(m, [math.pi / 4 * math.sqrt(v) for v in m], "--", color="grey", label=r"$\frac{\pi}{4}\sqrt{m}$")
    ax.set_xlabel("search space size m")
    ax.set_ylabel("oracle calls")
    ax.legend()
    return fig


def slope(xs, ys):
    lx = [math.log(v) for v in xs]
    ly = [math.log(v) for v in ys]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    sxy = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    sxx = sum((a - mx) ** 2 for a in lx)
    return sxy / sxx


def plot_shapes(run, cells):
    names = ["moons_uniform", "moons_gradient", "circles_uniform", "circles_gradient"]
    fig, axes = plt.subplots(2, 2, figsize=(9, 8))
    scores = {(int(c["shape"]), int(c["gradient"])): c for c in cells}
    for ax, name in zip(axes.flat, names):
        pts = run / "points" / f"{name}_points.csv"
        lab = run / "points" / f"{name}_clusters.csv"
        if not pts.exists():
            ax.set_axis_off()
            continue
        with open(pts, newline="") as f:
            xy = [(float(r["x1"]), float(r["x2"])) for r in csv.DictReader(f)]
        with open(lab, newline="") as f:
            labels = [int(r["label"]) for r in csv.DictReader(f)]
        ax.scatter([p[0] for p in xy], [p[1] for p in xy], c=labels, s=4, cmap="tab20")
        c = scores[(0 if name.startswith("moons") else 1, 1 if name.endswith("gradient") else 0)]
        ax.set_title(f"{name}: mean F_H={c['mean_fh']:.2f}, mean F_C={c['mean_fc']:.2f}", fontsize=9)
        ax.set_aspect("equal")
    fig.tight_layout()
    return fig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("run_dir", type=Path)
    ap.add_argument("--out", type=Path)
    args = ap.parse_args()

    run = args.run_dir
    kind = json.loads((run / "report.json").read_text())["config"]["experiment"]
    cells = read_cells(run)
    if kind == "noise":
        fig = plot_trend(cells, "sigma", "ratio", r"$N_N / N_C$", r"$\sigma$ = {:g}")
    elif kind == "overlap":
        fig = plot_trend(cells, "n1_over_n2", "r_over_sigma", r"$r / \sigma$", r"$N_1/N_2$ = {:g}", logx=True)
    elif kind == "lattice_scaling":
        fig = plot_lattice(cells)
    elif kind == "non_centroidal":
        fig = plot_shapes(run, cells)
    else:
        raise SystemExit(f"nothing to plot for experiment {kind!r}")
    out = args.out or run / f"{kind}.png"
    fig.savefig(out, dpi=150)
    print(out)


if __name__ == "__main__":
    main()
