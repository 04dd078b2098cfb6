"""Solve the forward problem for one configuration and print what it found.

Walks the basic objects: the characteristic function, the eigenvalue sweep
with its first-order predictions, and the nodal points of one eigenfunction.
"""

import numpy as np

from diracnodal import (
    delta,
    integrate,
    mu_zero,
    nodal_set,
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

print("jump weights: sigma_plus=%.6f sigma_minus=%.6f" %
      (config.sigma_plus, config.sigma_minus))
print("even-index drift c = %.9f" % config.c_even)
print()

# the characteristic function changes sign across each eigenvalue
for mu in (4.5, 4.6, 4.7, 4.8):
    print("delta(%.1f) = %+.6f" % (mu, delta(config, mu)))
print()

print(" n   first-order      computed         gap")
for n, mu in spectrum(config, 12):
    pred = mu_zero(config, n)
    print("%2d   %12.8f   %12.8f   %+.2e" % (n, pred, mu, mu - pred))
print()

ns = nodal_set(config, 10)
print("nodes of eigenfunction 10 (mu = %.8f):" % ns.mu_n)
print(np.array2string(ns.nodes, precision=6))

# the solution components at the final point feed the characteristic function
traj = integrate(config, ns.mu_n)
print("endpoint components: (%.3e, %.3e)" % (traj.at_end.y1, traj.at_end.y2))
