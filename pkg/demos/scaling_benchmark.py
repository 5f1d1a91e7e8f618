"""
Time to solve as systems grow
=============================

"""

# a few generated systems at each size, solved with the matrix-length encoding
import numpy as np
from lsinfer.genbench import GeneratorConfig, run_benchmark

records, summary = run_benchmark([2, 5, 10, 15], 5, "ml", GeneratorConfig(seed=1))
print(summary.text())

# per instance timings
ms = np.array([r.ms for r in records])
sizes = np.array([r.size for r in records])
for v in np.unique(sizes):
    sel = ms[sizes == v]
    print(v, "min", sel.min(), "median", int(np.median(sel)), "max", sel.max(), "ms")

# a cubic trend is fit once there are four sizes
print(np.poly1d(summary.trend))
