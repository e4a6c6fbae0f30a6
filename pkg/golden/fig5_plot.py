"""Plot for fig5.csv (log-log axes)."""
import os
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

csv = os.path.join(os.path.dirname(__file__), "fig5.csv")
if not os.path.exists(csv):
    raise SystemExit(f"missing CSV: {csv}")
n_skip = 0
with open(csv) as fh:
    for line in fh:
        n_skip += 1
        if not line.startswith("#"):
            names = line.strip().split(",")
            break
data = np.loadtxt(csv, delimiter=",", skiprows=n_skip, ndmin=2)
x = data[:, 0]
fig, ax = plt.subplots(figsize=(6, 4.2))
for i, name in enumerate(names[1:], start=1):
    y = data[:, i]
    ok = np.isfinite(y) & (y > 0)
    ax.loglog(x[ok], y[ok], label=name)
ax.set_xlabel(names[0])
ax.set_ylabel("value")
ax.legend(fontsize=7)

fig.tight_layout()
fig.savefig(csv.replace(".csv", ".png"), dpi=160)
print("wrote", csv.replace(".csv", ".png"))
