#!/usr/bin/env python3
"""Plot benchmark CSV profiles produced by run_benchmarks.py or the CLI.

Reads one or more run CSVs (x, rho, v, p, alpha columns) and draws density
profiles with the blend parameter overlaid, optionally against a reference.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csvs", nargs="+", help="run CSV files")
    ap.add_argument("--reference", help="optional reference CSV (x, rho)")
    ap.add_argument("--out", default="artifacts/profiles.png")
    args = ap.parse_args(argv)

    fig, ax = plt.subplots(figsize=(9, 5))
    ax2 = ax.twinx()
    if args.reference:
        ref = np.loadtxt(args.reference, delimiter=",", skiprows=1)
        ax.plot(ref[:, 0], ref[:, 1], "k-", lw=0.8, label="reference", alpha=0.7)
    for path in args.csvs:
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        label = path.rsplit("/", 1)[-1].removesuffix(".csv")
        ax.plot(data[:, 0], data[:, 1], lw=1.2, label=label)
        ax2.plot(data[:, 0], data[:, 4], ":", lw=0.8, alpha=0.6)
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax2.set_ylabel("blend parameter (dotted)")
    ax2.set_ylim(-0.02, 1.05)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
