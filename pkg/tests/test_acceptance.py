"""End-to-end accuracy gates.

Each test is one shipping criterion with its pinned tolerance; the -v run
gives one pass/fail line per criterion.  Assertions carry the measured value
so a failure log shows the margin directly.
"""

import inspect
import math
import time

import numpy as np

from diracnodal import (
    PI,
    PI_HALF,
    delta_asymptotic,
    delta_batch,
    integral_residual,
    integrate,
    mu_zero,
    nodal_set,
    node_asymptotic,
    reconstruct,
    second_order_adjudication,
    spectrum,
)
from diracnodal.cli import _envelope_slope


def _v_sup_error(result, config):
    return max(abs(v - float(config.V(x))) for x, v in result.v_hat)


def test_exactly_solvable_spectrum_and_nodes(t_config):
    # integer eigenvalues and closed-form nodes, indices 1..30, within 1e-8
    t0 = time.perf_counter()
    pairs = spectrum(t_config, 30)
    worst_mu = max(abs(mu - n) for n, mu in pairs)
    worst_node = 0.0
    for n, mu in pairs:
        nodes = nodal_set(t_config, n, mu=mu).nodes
        expect = (t_config.theta - PI_HALF + PI * np.arange(1, n + 1)) / n
        worst_node = max(worst_node, float(np.max(np.abs(nodes - expect))))
    elapsed = time.perf_counter() - t0
    assert worst_mu < 1e-8, f"eigenvalue error {worst_mu:.3e}"
    assert worst_node < 1e-8, f"node error {worst_node:.3e}"
    assert elapsed < 30.0, f"took {elapsed:.1f}s"


def test_synthetic_series_reconstruction(series_dataset):
    # dense synthetic nodal data, tangent-linearized reconstruction:
    # angle to 1e-3, mass to 5e-2, potential sup-norm to 5e-2
    res = reconstruct(series_dataset, mode="paper")
    theta_err = abs(res.theta_hat - 1.0)
    m_err = abs(res.m_hat - 2.0)
    v_err = max(abs(v - (-math.cos(x))) for x, v in res.v_hat)
    assert theta_err < 1e-3, f"angle error {theta_err:.3e}"
    assert m_err < 5e-2, f"mass error {m_err:.3e}"
    assert v_err < 5e-2, f"potential sup error {v_err:.3e}"
    assert abs(res.c_hat) < 1e-3, f"drift error {abs(res.c_hat):.3e}"


def test_forward_inverse_roundtrip(d_config, d_dataset):
    # solve forward for even indices 8..512, reconstruct, compare to truth:
    # angle 1e-2, drift 1e-2, potential sup 5e-2, mass 1e-1, ten-minute budget
    ds, build_seconds = d_dataset
    t0 = time.perf_counter()
    res = reconstruct(ds, mode="consistent")
    total = build_seconds + (time.perf_counter() - t0)
    theta_err = abs(res.theta_hat - d_config.theta)
    c_err = abs(res.c_hat - d_config.c_even)
    v_err = _v_sup_error(res, d_config)
    m_err = abs(res.m_hat - d_config.mass)
    assert theta_err < 1e-2, f"angle error {theta_err:.3e}"
    assert c_err < 1e-2, f"drift error {c_err:.3e}"
    assert v_err < 5e-2, f"potential sup error {v_err:.3e}"
    assert m_err < 1e-1, f"mass error {m_err:.3e}"
    assert total < 600.0, f"roundtrip took {total:.1f}s"


def test_eigenvalue_expansion_rate(d_config):
    # |mu_n - first-order prediction| decays at least like 1/n over 8..256
    pairs = spectrum(d_config, 256, n_min=8)
    ns = np.array([n for n, _ in pairs], dtype=float)
    errs = np.array([abs(mu - mu_zero(d_config, n)) for n, mu in pairs])
    slope = float(np.polyfit(np.log(ns), np.log(errs), 1)[0])
    assert slope <= -0.9, f"log-log slope {slope:.3f}"


def test_node_expansion_rate(d_dataset, d_config):
    # exact-arctangent node series: max error per index decays like 1/n^2
    # over even indices 8..128
    ds, _ = d_dataset
    ns, errs = [], []
    for n in [k for k in ds.sorted_n() if k <= 128]:
        e = ds.entries[n]
        pred = np.array([node_asymptotic(d_config, n, j, "consistent")
                         for j in range(1, n + 1)])
        ns.append(n)
        errs.append(float(np.max(np.abs(pred - e.nodes))))
    slope = float(np.polyfit(np.log(ns), np.log(errs), 1)[0])
    assert slope <= -1.8, f"log-log slope {slope:.3f}"


def test_integral_residual_bounds(d_config):
    # the propagated solution satisfies the integral identities:
    # left residual below 1e-6, right below 1e-5, at low and high frequency
    for mu in (1.0, 5.3, 12.0):
        traj = integrate(d_config, mu)
        left, right = integral_residual(d_config, traj, parts=True)
        assert left < 1e-6, f"left residual {left:.3e} at mu={mu}"
        assert right < 1e-5, f"right residual {right:.3e} at mu={mu}"


def test_characteristic_expansion_envelope(d_config):
    # mu * |exact - expansion| stays bounded across 20..200
    mus = np.arange(20.0, 200.0 + 1e-9, 0.7)
    scaled = np.abs(mus * (delta_batch(d_config, mus) - delta_asymptotic(d_config, mus)))
    slope = _envelope_slope(mus, scaled)
    assert math.isfinite(slope)
    assert slope <= 0.1, f"envelope slope {slope:.3f}"
    assert float(np.max(scaled)) < 10.0


def test_second_order_convention_adjudication(d_config, d_dataset):
    # the fitted second-order slope names the exact-arctangent convention,
    # stably across the data size, and that convention is the default
    ds, _ = d_dataset
    for n_max in (128, 256, 512):
        out = second_order_adjudication(d_config, ds, n_max)
        assert out["best"] == "consistent", (
            f"n_max={n_max}: slope {out['slope']:.4f} named {out['best']}")
        assert abs(out["slope"] - 2.0) < 0.3, f"slope {out['slope']:.4f}"
    assert inspect.signature(reconstruct).parameters["mode"].default == "consistent"
