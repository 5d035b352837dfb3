"""Delimited output and figure rendering for the CLI report paths.

Figures are rendered headless (Agg) next to the delimited files so a
batch run leaves both machine-readable rows and a quick visual check.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def write_delimited(path, fieldnames: list[str], rows: list[dict], delimiter: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, delimiter=delimiter)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in fieldnames})


def density_figure(rows: list[dict], path) -> Path:
    """Nonzero-coefficient fraction against the decade bounds, log-x.

    Rows may mix several (a, b, c) triples; each gets its own line.
    """
    path = Path(path)
    groups: dict[tuple[int, int, int], list[dict]] = {}
    for row in rows:
        groups.setdefault((row["a"], row["b"], row["c"]), []).append(row)
    fig, ax = plt.subplots(figsize=(6, 4))
    for key in sorted(groups):
        pts = sorted(groups[key], key=lambda r: r["bound"])
        ax.plot(
            [p["bound"] for p in pts],
            [p["fraction"] for p in pts],
            marker="o",
            label="F(%d,%d,%d)" % key,
        )
    ax.set_xscale("log")
    ax.set_xlabel("coefficient index bound")
    ax.set_ylabel("fraction nonzero")
    ax.set_ylim(bottom=0)
    ax.legend()
    ax.set_title("nonzero coefficient density by decade")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def classify_figure(result: dict, path) -> Path:
    """One marker per (a, c) pair sized by candidate count; survivors
    annotated with their b values."""
    path = Path(path)
    pairs = result["pairs"]
    survivors = {tuple(t) for t in result["survivors"]}
    fig, ax = plt.subplots(figsize=(7, 4.5))
    xs = [p["c"] for p in pairs]
    ys = [p["a"] for p in pairs]
    sizes = [30 + 50 * len(p["candidates"]) for p in pairs]
    colors = ["tab:red" if p["incomplete"] else "tab:blue" for p in pairs]
    ax.scatter(xs, ys, s=sizes, c=colors, alpha=0.6)
    by_pair: dict[tuple[int, int], list[int]] = {}
    for a, b, c in sorted(survivors):
        by_pair.setdefault((a, c), []).append(b)
    for (a, c), bs in by_pair.items():
        ax.annotate(
            "b=" + ",".join(map(str, bs)),
            (c, a),
            textcoords="offset points",
            xytext=(0, 9),
            ha="center",
            fontsize=8,
            color="tab:green",
        )
        ax.scatter([c], [a], marker="*", s=180, c="tab:green", zorder=3)
    ax.set_xlabel("c")
    ax.set_ylabel("a")
    ax.set_yticks(sorted({p["a"] for p in pairs}))
    ax.set_title("candidates per pair (stars: not eliminated)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path
