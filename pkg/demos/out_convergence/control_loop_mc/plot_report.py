"""Log-log error plot for report.csv (generated alongside the report)."""
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "report.csv"
with open(path) as fh:
    rows = list(csv.DictReader(fh))
dx = [float(r["dx"]) for r in rows]
names = [k[4:] for k in rows[0] if k.startswith("err_")]
for name in names:
    plt.loglog(dx, [float(r["err_" + name]) for r in rows], "o-",
               label=f"{name} (order {float(rows[0]['order_' + name]):.2f})")
plt.xlabel("dx")
plt.ylabel("max error")
plt.legend()
plt.grid(True, which="both", alpha=0.3)
plt.savefig("report.png", dpi=150, bbox_inches="tight")
print("wrote report.png")
