#!/usr/bin/env python3
"""Plot achieved Corr masses against their 1-epsilon targets from a bench CSV.

Usage: plot_convergence.py <results.csv> <out.png>
"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    rows = []
    with open(sys.argv[1]) as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        for row in reader:
            if row["error"]:
                continue
            mass = row["corr_c_mass"] or row["corr_sc_mass"] or row["deep_corr_mass"] or row["corr_s_mass"]
            if not mass:
                continue
            rows.append(
                {
                    "algorithm": row["algorithm"],
                    "epsilon": float(row["epsilon"]),
                    "mass": float(mass),
                    "label": f'{row["family"]}[{row["params"]}] {row["measure"]}',
                }
            )
    if not rows:
        print("no plottable rows", file=sys.stderr)
        return 1
    fig, ax = plt.subplots(figsize=(8, 5))
    markers = {"koenig": "o", "orient": "s", "decorate": "^"}
    for alg, marker in markers.items():
        xs = [r["epsilon"] for r in rows if r["algorithm"] == alg]
        ys = [r["mass"] for r in rows if r["algorithm"] == alg]
        if xs:
            ax.scatter(xs, ys, marker=marker, label=alg, alpha=0.7)
    eps = sorted({r["epsilon"] for r in rows})
    ax.plot(eps, [1 - e for e in eps], "k--", label="target 1 - eps")
    ax.set_xscale("log")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("achieved Corr mass")
    ax.legend()
    ax.set_title("convergence: achieved mass vs. target")
    fig.tight_layout()
    fig.savefig(sys.argv[2], dpi=150)
    print(f"wrote {sys.argv[2]} ({len(rows)} runs)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
