"""Contour-style plot of a detectable (n, m) region from a `ramanent region` CSV.

Needs matplotlib (the `plots` extra); the CSV is the actual artifact.

    ramanent region --spec 1,2,3 --grid 130x130 --out region.csv
    python scripts/plot_region.py region.csv region.png
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def load(path):
    with open(path) as fh:
        rows = list(csv.reader(line for line in fh if not line.startswith("#")))
    body = rows[1:]
    n = np.array([int(r[0]) for r in body])
    m = np.array([int(r[1]) for r in body])
    grid = np.zeros((n.max() + 1, m.max() + 1))
    grid[n, m] = [int(r[2]) for r in body]
    return grid


def main(src, dst):
    grid = load(src)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(grid.T, origin="lower", cmap="Greys", interpolation="nearest")
    ax.set_xlabel("n")
    ax.set_ylabel("m")
    fig.tight_layout()
    fig.savefig(dst, dpi=150)


if __name__ == "__main__":
    main(*sys.argv[1:3])
