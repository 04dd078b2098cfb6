"""How fast the large-parameter expansions close in on the solver.

Three tables: eigenvalue prediction error, node series error for both
conventions, and the scaled characteristic-function residual.  The node
table is the interesting one: the tangent-linearized series stalls at a
fixed offset error while the exact-arctangent series keeps shrinking
like 1/n^2.
"""

import numpy as np

from diracnodal import (
    delta_asymptotic,
    delta_batch,
    mu_zero,
    nodal_set,
    node_asymptotic,
    spectrum,
    validate_config,
)

config = validate_config({
    "theta": 1.0,
    "beta": 0.5,
    "sigma": 2.0,
    "mass": 2.0,
    "potential": {"kind": "cos", "amplitude": -1.0},
})

indices = [8, 16, 32, 64, 128]
mus = dict(spectrum(config, indices[-1], n_min=indices[0]))

print("  n   |mu_n - prediction|")
for n in indices:
    print("%4d   %.3e" % (n, abs(mus[n] - mu_zero(config, n))))
print()

print("  n   paper series   consistent series   (max node error)")
errs = {"paper": [], "consistent": []}
for n in indices:
    nodes = nodal_set(config, n, mu=mus[n]).nodes
    row = []
    for mode in ("paper", "consistent"):
        pred = np.array([node_asymptotic(config, n, j, mode)
                         for j in range(1, n + 1)])
        e = float(np.max(np.abs(pred - nodes)))
        errs[mode].append(e)
        row.append(e)
    print("%4d   %.3e      %.3e" % (n, row[0], row[1]))

ln = np.log(np.array(indices, dtype=float))
for mode in ("paper", "consistent"):
    slope = np.polyfit(ln, np.log(errs[mode]), 1)[0]
    print("%s slope: %.2f" % (mode, slope))
print()

grid = np.arange(20.0, 200.0, 0.7)
scaled = np.abs(grid * (delta_batch(config, grid) - delta_asymptotic(config, grid)))
print("scaled characteristic residual mu*|exact - expansion| over [20, 200):")
print("  max %.3f   at mu = %.1f" % (scaled.max(), grid[scaled.argmax()]))
print("  mean %.3f" % scaled.mean())
