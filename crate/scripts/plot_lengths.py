"""Plot mean coding length against block count from an experiment CSV.

usage: python3 scripts/plot_lengths.py fig3.csv [out.png]
"""
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

rows = pd.read_csv(sys.argv[1])
means = rows.groupby(["mode", "blocks"])["actual_bits"].mean().unstack("mode")
ax = means.plot(marker="o")
ax.set_xscale("log", base=2)
ax.set_xlabel("blocks B")
ax.set_ylabel("mean coding length (bits)")
plt.savefig(sys.argv[2] if len(sys.argv) > 2 else "lengths.png", dpi=120, bbox_inches="tight")
