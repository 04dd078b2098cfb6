"""Large-parameter expansions and node location series."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diracnodal import (
    PI,
    PI_HALF,
    delta,
    delta_asymptotic,
    integrate,
    limit_functions,
    mu_zero,
    nodal_set,
    node_asymptotic,
    phi_closed,
    principal_band,
    psi_asymptotic,
    psi_closed,
    series_nodes,
    star_constants,
    validate_config,
)
from diracnodal import asymptotics

COT1 = 1.0 / math.tan(1.0)
CSC2_1 = 1.0 / math.sin(1.0) ** 2


def test_principal_band_values():
    assert principal_band(0.3) == pytest.approx(0.3)
    assert principal_band(PI_HALF) == pytest.approx(PI_HALF)
    assert principal_band(PI_HALF + 0.1) == pytest.approx(0.1 - PI_HALF)
    assert principal_band(-PI_HALF) == pytest.approx(PI_HALF)
    assert principal_band(4.0 * PI + 0.2) == pytest.approx(0.2)


@settings(max_examples=120, deadline=None)
@given(v=st.floats(-50.0, 50.0))
def test_principal_band_is_a_mod_pi_representative(v):
    out = principal_band(v)
    assert -PI_HALF < out <= PI_HALF + 1e-12
    k = (v - out) / PI
    assert abs(k - round(k)) < 1e-9


def test_first_order_eigenvalue_prediction(d_config, t_config):
    assert mu_zero(d_config, 8) == pytest.approx(8.2520306963754351, abs=1e-12)
    # the parity term flips sign between neighbours
    expect9 = 9.0 - (0.5 - 1.0) / PI - d_config.arcsin_gamma / PI
    assert mu_zero(d_config, 9) == pytest.approx(expect9, abs=1e-14)
    assert mu_zero(t_config, 13) == 13.0


def test_solution_expansion_rejects_the_jump_point(d_config):
    with pytest.raises(ValueError):
        psi_asymptotic(d_config, PI_HALF, 40.0)


def test_solution_expansion_tracks_the_solver(d_config):
    def expansion_error(mu):
        traj = integrate(d_config, mu)
        worst = 0.0
        for x in (0.6, 1.2, 2.0, 2.9):
            i = int(np.argmin(np.abs(traj.x - x)))
            a = psi_asymptotic(d_config, float(traj.x[i]), mu)
            worst = max(worst, abs(a.y1 - traj.y1[i]), abs(a.y2 - traj.y2[i]))
        return worst

    e20 = expansion_error(20.0)
    e80 = expansion_error(80.0)
    assert e20 < 0.25
    assert e80 < 0.05
    assert e80 < e20 / 3.0  # decays as the frequency grows


def test_characteristic_expansion_error_bound(d_config):
    for mu in (30.0, 100.0):
        err = abs(delta(d_config, mu) - delta_asymptotic(d_config, mu))
        assert err < 5.0 / mu


def test_characteristic_expansion_vectorizes(d_config):
    mus = np.array([25.0, 40.0, 90.0])
    vals = delta_asymptotic(d_config, mus)
    assert vals.shape == (3,)
    for mu, v in zip(mus, vals):
        scalar = delta_asymptotic(d_config, float(mu))
        assert isinstance(scalar, float)
        assert v == pytest.approx(scalar, abs=1e-15)


def test_series_constants_parity(s_config):
    even = star_constants(s_config, 1.8, 2)
    odd = star_constants(s_config, 1.8, 3)
    assert even.parity == 1 and odd.parity == -1
    assert even.b == pytest.approx(s_config.beta - s_config.arcsin_gamma)
    assert odd.b == pytest.approx(s_config.beta + s_config.arcsin_gamma)
    assert even.b != pytest.approx(odd.b)


def test_right_offset_conventions_disagree_across_the_jump(s_config):
    paper = limit_functions(s_config, "paper")
    cons = limit_functions(s_config, "consistent")
    assert paper.k_right == pytest.approx(-0.372214928285799, abs=1e-12)
    assert cons.k_right == pytest.approx(-1.1478755191009178, abs=1e-12)
    assert paper.k_left == pytest.approx(-COT1)
    assert cons.k_left == pytest.approx(1.0 - PI_HALF)


def test_offsets_continuous_without_a_jump():
    cfg = validate_config({"theta": 1.0, "beta": 0.7, "sigma": 1.0, "mass": 1.5,
                           "potential": {"kind": "cos", "amplitude": -1.0}})
    for mode in ("paper", "consistent"):
        lf = limit_functions(cfg, mode)
        assert lf.k_left == pytest.approx(lf.k_right, abs=1e-14)


def test_first_order_limit_function(d_config):
    c = d_config.c_even
    x = 0.8
    assert phi_closed(d_config, x, "paper") == pytest.approx(
        d_config.rho(x) + c * x - COT1, abs=1e-14)
    assert phi_closed(d_config, x, "consistent") == pytest.approx(
        d_config.rho(x) + c * x + 1.0 - PI_HALF, abs=1e-14)
    # one-sided values at the jump point differ by the offset gap
    lf = limit_functions(d_config, "consistent")
    lo = phi_closed(d_config, PI_HALF, "consistent", side="left")
    hi = phi_closed(d_config, PI_HALF, "consistent", side="right")
    assert hi - lo == pytest.approx(lf.k_right - lf.k_left, abs=1e-14)


def test_second_order_limit_function(d_config):
    c = d_config.c_even
    m = d_config.mass
    x = 0.5
    expect_paper = (c * d_config.rho(x) + c * COT1 + m * COT1
                    + 0.5 * m * m * x * CSC2_1)
    assert psi_closed(d_config, x, "paper") == pytest.approx(expect_paper, abs=1e-13)
    expect_cons = (c * (d_config.rho(x) + 1.0 - PI_HALF)
                   + m * math.sin(1.0) * math.cos(1.0) + 0.5 * m * m * x)
    assert psi_closed(d_config, x, "consistent") == pytest.approx(expect_cons, abs=1e-13)
    with pytest.raises(ValueError):
        psi_closed(d_config, 2.0, "consistent")
    assert limit_functions(d_config, "consistent").psi_right is None


def test_limit_functions_match_reference_closed_forms(p_config, series_limits):
    # p_config reproduces the hand-derived limit data exactly
    lf = limit_functions(p_config, "paper")
    assert lf.c == pytest.approx(0.0, abs=1e-15)
    assert lf.k_left == pytest.approx(series_limits["k_left"], abs=1e-14)
    assert lf.k_right == pytest.approx(series_limits["k_right"], abs=1e-12)
    for x in (0.3, 1.0, 1.5):
        assert psi_closed(p_config, x, "paper") == pytest.approx(
            series_limits["psi_left"](x), abs=1e-12)
    for x in (1.7, 2.4, 3.0):
        assert psi_closed(p_config, x, "paper") == pytest.approx(
            series_limits["psi_right"](x), abs=1e-11)


def test_mode_strings_validated(d_config):
    with pytest.raises(ValueError):
        phi_closed(d_config, 0.5, "fancy")
    with pytest.raises(ValueError):
        node_asymptotic(d_config, 10, 3, "fancy")
    with pytest.raises(ValueError):
        node_asymptotic(d_config, 0, 1, "paper")


def test_node_series_exactly_solvable(t_config):
    assert node_asymptotic(t_config, 10, 3, "paper") == pytest.approx(
        0.87826853448350484, abs=1e-12)
    assert node_asymptotic(t_config, 10, 3, "consistent") == pytest.approx(
        0.88539816339744826, abs=1e-12)
    # the exact node is (theta - pi/2 + 3*pi)/10; only the exact-arctangent
    # convention lands on it
    exact = (1.0 - PI_HALF + 3.0 * PI) / 10.0
    assert node_asymptotic(t_config, 10, 3, "consistent") == pytest.approx(exact, abs=1e-12)


def test_node_series_approaches_true_nodes(d_config):
    n = 64
    ns = nodal_set(d_config, n)
    pred = np.array([node_asymptotic(d_config, n, j, "consistent")
                     for j in range(1, n + 1)])
    assert np.max(np.abs(pred - ns.nodes)) < 2e-3


def test_node_series_permissive_labels(d_config):
    # labels outside 1..n evaluate the formula as given
    v = node_asymptotic(d_config, 10, 0, "consistent")
    assert math.isfinite(v)
    assert v < node_asymptotic(d_config, 10, 1, "consistent")


def test_series_generator_matches_node_series(p_config, series_limits):
    n = 64
    got = series_nodes(n, passes=2, **series_limits)
    ref = np.array([node_asymptotic(p_config, n, j, "paper")
                    for j in range(1, n + 1)])
    assert np.max(np.abs(got - ref)) < 1e-12


def test_series_generator_rejects_escaping_nodes(series_limits):
    # the right-half second-order term overwhelms 1/n^2 for small n
    with pytest.raises(ValueError):
        series_nodes(8, **series_limits)
    nodes = series_nodes(22, **series_limits)
    assert nodes.size == 22
    assert np.all((nodes > 0.0) & (nodes < PI))
    assert np.all(np.diff(nodes) > 0.0)


def test_two_pass_resolution_close_to_converged(d_config):
    # a third pass moves the paper-mode node by far less than the series error
    n, j = 64, 16
    x2 = node_asymptotic(d_config, n, j, "paper")
    x3 = asymptotics._series_pass_paper(d_config, n, j, x2)
    assert abs(x3 - x2) < 1e-4
    assert abs(x3 - x2) < abs(x2 - j * PI / n) / 100.0
