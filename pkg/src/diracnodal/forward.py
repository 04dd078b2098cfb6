"""Shooting solver for the jump system.

Propagates the initial-value solution across both half-intervals with a
fixed-step fourth-order scheme, applies the interior jump exactly, and builds
the characteristic function, eigenvalues, and nodal sets on top.  Step counts
scale with |mu| so phase error stays bounded at large index.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_simpson

from . import _kernels
from .asymptotics import mu_zero
from .errors import (
    IntegrationOverflow,
    MultipleRootsAmbiguous,
    NodeCountMismatch,
    NoRootInWindow,
)
from .model import PI, PI_HALF, ComponentPair, ProblemConfig

BASE_STEPS_DEFAULT = 4096
_STEPS_PER_UNIT_MU = 48
_ENV_BASE = "NODAL_GRID_N"


def base_steps() -> int:
    """Per-half step count floor; the environment can raise or lower it."""
    raw = os.environ.get(_ENV_BASE)
    if raw is None:
        return BASE_STEPS_DEFAULT
    try:
        val = int(raw)
    except ValueError as exc:
        raise ValueError(f"{_ENV_BASE} must be an integer, got {raw!r}") from exc
    if val < 16:
        raise ValueError(f"{_ENV_BASE} must be at least 16")
    return val


def steps_for(mu: float, base: int | None = None) -> int:
    """Step count per half for one mu: the base, doubled until it covers
    _STEPS_PER_UNIT_MU steps per unit of |mu|."""
    n = base if base is not None else base_steps()
    need = _STEPS_PER_UNIT_MU * max(1.0, abs(mu))
    while n < need:
        n *= 2
    return n


@lru_cache(maxsize=64)
def _half_grid(vspec, n_steps: int, half: int):
    a = 0.0 if half == 0 else PI_HALF
    x = np.linspace(a, a + PI_HALF, n_steps + 1)
    vg = np.ascontiguousarray(vspec(x), dtype=float)
    vm = np.ascontiguousarray(vspec(0.5 * (x[:-1] + x[1:])), dtype=float)
    return x, vg, vm


def _endpoints(config: ProblemConfig, mus: np.ndarray, n_steps: int):
    """Solution components at pi for a batch of mu, one fixed grid."""
    mus = np.ascontiguousarray(mus, dtype=float)
    _, vgl, vml = _half_grid(config.V, n_steps, 0)
    _, vgr, vmr = _half_grid(config.V, n_steps, 1)
    h = PI_HALF / n_steps
    y1 = np.full(mus.shape, math.cos(config.theta))
    y2 = np.full(mus.shape, -math.sin(config.theta))
    o1 = np.empty_like(y1)
    o2 = np.empty_like(y2)
    _kernels.half_endpoint_batch(mus, y1, y2, vgl, vml, config.mass, h, o1, o2)
    o1 *= config.sigma
    o2 /= config.sigma
    r1 = np.empty_like(o1)
    r2 = np.empty_like(o2)
    _kernels.half_endpoint_batch(mus, o1, o2, vgr, vmr, config.mass, h, r1, r2)
    if not (np.all(np.isfinite(r1)) and np.all(np.isfinite(r2))):
        bad = mus[~(np.isfinite(r1) & np.isfinite(r2))]
        raise IntegrationOverflow(f"non-finite propagation for mu near {bad[:3]}")
    return r1, r2


def delta_batch(config: ProblemConfig, mus, n_steps: int | None = None) -> np.ndarray:
    """Characteristic function on an array of mu values.

    With n_steps unset, values are grouped by the step tier each |mu| needs.
    """
    mus = np.atleast_1d(np.asarray(mus, dtype=float))
    sb, cb = math.sin(config.beta), math.cos(config.beta)
    out = np.empty(mus.shape)
    if n_steps is not None:
        r1, r2 = _endpoints(config, mus, n_steps)
        out[:] = sb * r1 + cb * r2
        return out
    tiers = np.array([steps_for(m) for m in mus])
    for tier in np.unique(tiers):
        idx = np.nonzero(tiers == tier)[0]
        r1, r2 = _endpoints(config, mus[idx], int(tier))
        out[idx] = sb * r1 + cb * r2
    return out


def delta(config: ProblemConfig, mu: float, n_steps: int | None = None) -> float:
    """Boundary-form value whose zeros are the eigenvalues."""
    return float(delta_batch(config, [mu], n_steps)[0])


@dataclass
class Trajectory:
    """Stored propagation on both halves; the jump point appears twice,
    first with the left limit, then with the right."""

    mu: float
    n_steps: int
    x: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    seam: int

    @property
    def at_end(self) -> ComponentPair:
        return ComponentPair(float(self.y1[-1]), float(self.y2[-1]))

    @property
    def left(self):
        s = slice(0, self.seam + 1)
        return self.x[s], self.y1[s], self.y2[s]

    @property
    def right(self):
        s = slice(self.seam + 1, None)
        return self.x[s], self.y1[s], self.y2[s]


def integrate(config: ProblemConfig, mu: float, n_steps: int | None = None) -> Trajectory:
    """Propagate from 0 to pi, storing both components on the step grid.

    n_steps fixes the per-half step count exactly (resolution studies need
    that); when unset it follows the |mu|-scaled tier.
    """
    n = n_steps if n_steps is not None else steps_for(mu)
    xl, vgl, vml = _half_grid(config.V, n, 0)
    xr, vgr, vmr = _half_grid(config.V, n, 1)
    h = PI_HALF / n
    y0 = config.initial_values()
    l1 = np.empty(n + 1)
    l2 = np.empty(n + 1)
    _kernels.half_store(float(mu), y0.y1, y0.y2, vgl, vml, config.mass, h, l1, l2)
    r1 = np.empty(n + 1)
    r2 = np.empty(n + 1)
    _kernels.half_store(float(mu), l1[-1] * config.sigma, l2[-1] / config.sigma,
                        vgr, vmr, config.mass, h, r1, r2)
    y1 = np.concatenate([l1, r1])
    y2 = np.concatenate([l2, r2])
    if not (np.all(np.isfinite(y1)) and np.all(np.isfinite(y2))):
        raise IntegrationOverflow(f"non-finite propagation at mu={mu}")
    return Trajectory(mu=float(mu), n_steps=n, x=np.concatenate([xl, xr]),
                      y1=y1, y2=y2, seam=n)


def _bisect_roots(config, lo, hi, flo, n_steps, tol):
    """Lockstep bisection on pre-bracketed sign changes of the
    characteristic function."""
    lo = lo.copy()
    hi = hi.copy()
    neg = flo < 0.0
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fm = delta_batch(config, mid, n_steps)
        go_right = (fm < 0.0) == neg
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    return 0.5 * (lo + hi)


def _roots_in_window(config, center, width, n_steps, tol, scan_step=0.01):
    count = max(3, int(round(2.0 * width / scan_step)) + 1)
    grid = np.linspace(center - width, center + width, count)
    steps = n_steps if n_steps is not None else steps_for(abs(center) + width)
    f = delta_batch(config, grid, steps)
    roots = [grid[i] for i in range(count) if f[i] == 0.0]
    change = np.nonzero(f[:-1] * f[1:] < 0.0)[0]
    if change.size:
        found = _bisect_roots(config, grid[change], grid[change + 1], f[change], steps, tol)
        roots.extend(found.tolist())
    return np.sort(np.array(roots))


def eigenvalue_near(config: ProblemConfig, n: int, n_steps: int | None = None,
                    tol: float = 1e-12) -> float:
    """Eigenvalue with index n, located from its first-order prediction.

    Scans a window of half-width 0.5 around the prediction at step 0.01,
    bisects every sign change to tol, and returns the root closest to the
    prediction.  The window doubles up to three times if the scan is empty.
    """
    if n == 0:
        raise ValueError("index n must be nonzero")
    center = mu_zero(config, n)
    width = 0.5
    for _ in range(4):
        roots = _roots_in_window(config, center, width, n_steps, tol)
        if roots.size:
            dist = np.abs(roots - center)
            order = np.argsort(dist)
            if roots.size > 1 and abs(dist[order[0]] - dist[order[1]]) < 1e-9:
                raise MultipleRootsAmbiguous(
                    f"n={n}: roots {roots[order[0]]:.12f} and {roots[order[1]]:.12f} "
                    f"are equidistant from {center:.12f}"
                )
            return float(roots[order[0]])
        width *= 2.0
    raise NoRootInWindow(f"n={n}: no sign change within {width / 2.0} of {center:.6f}")


def spectrum(config: ProblemConfig, n_max: int, n_min: int = 1,
             even_only: bool = False, n_steps: int | None = None) -> list[tuple[int, float]]:
    """Eigenvalues for n_min..n_max, batched across indices.

    All scan points sharing a step tier propagate together, then all brackets
    bisect in lockstep, so large sweeps cost a handful of batch passes.
    """
    if n_max < 1 or n_min < 1 or n_max < n_min:
        raise ValueError("need 1 <= n_min <= n_max")
    ns = [n for n in range(n_min, n_max + 1) if not (even_only and n % 2)]
    width = 0.5
    scan_step = 0.01
    per = int(round(2.0 * width / scan_step)) + 1
    centers = {n: mu_zero(config, n) for n in ns}
    tiers = {n: (n_steps if n_steps is not None else steps_for(abs(centers[n]) + width))
             for n in ns}

    grids = {n: np.linspace(centers[n] - width, centers[n] + width, per) for n in ns}
    fvals = {}
    for tier in sorted(set(tiers.values())):
        group = [n for n in ns if tiers[n] == tier]
        flat = np.concatenate([grids[n] for n in group])
        vals = delta_batch(config, flat, tier)
        for k, n in enumerate(group):
            fvals[n] = vals[k * per:(k + 1) * per]

    results: dict[int, float] = {}
    pending = {}
    for n in ns:
        f = fvals[n]
        g = grids[n]
        exact = [g[i] for i in range(per) if f[i] == 0.0]
        change = np.nonzero(f[:-1] * f[1:] < 0.0)[0]
        if change.size == 0 and not exact:
            results[n] = eigenvalue_near(config, n, n_steps)  # widened-window fallback
            continue
        pending[n] = (g[change], g[change + 1], f[change], exact)

    for tier in sorted({tiers[n] for n in pending}):
        group = [n for n in pending if tiers[n] == tier]
        los = np.concatenate([pending[n][0] for n in group])
        his = np.concatenate([pending[n][1] for n in group])
        flo = np.concatenate([pending[n][2] for n in group])
        if los.size:
            roots = _bisect_roots(config, los, his, flo, tier, 1e-12)
        else:
            roots = np.empty(0)
        pos = 0
        for n in group:
            cnt = pending[n][0].size
            cand = np.concatenate([roots[pos:pos + cnt], np.asarray(pending[n][3])])
            pos += cnt
            dist = np.abs(cand - centers[n])
            order = np.argsort(dist)
            if cand.size > 1 and abs(dist[order[0]] - dist[order[1]]) < 1e-9:
                raise MultipleRootsAmbiguous(f"n={n}: equidistant candidate roots")
            results[n] = float(cand[order[0]])

    out = [(n, results[n]) for n in ns]
    for (n1, m1), (n2, m2) in zip(out, out[1:]):
        if m2 <= m1:
            raise MultipleRootsAmbiguous(
                f"indices {n1} and {n2} resolved to non-increasing values {m1}, {m2}"
            )
    return out


@dataclass
class NodalSet:
    """Interior zeros of the first component for one eigenfunction."""

    n: int
    mu_n: float
    nodes: np.ndarray


def _refine_half(config, mu, x, y1, y2, tol):
    """Vectorized in-cell bisection against sign changes of the first
    component, restarting single steps from stored states."""
    prod = y1[:-1] * y1[1:]
    cells = np.nonzero(prod < 0.0)[0]
    roots = [float(x[i]) for i in np.nonzero(y1 == 0.0)[0]]
    if cells.size == 0:
        return roots
    x0 = x[cells]
    a1 = y1[cells]
    a2 = y2[cells]
    h_cell = x[1] - x[0]
    lo = np.zeros(cells.size)
    hi = np.full(cells.size, h_cell)
    sgn_lo = np.sign(a1)
    m = config.mass
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        v0 = np.asarray(config.V(x0), dtype=float)
        vm = np.asarray(config.V(x0 + 0.5 * mid), dtype=float)
        v1 = np.asarray(config.V(x0 + mid), dtype=float)
        f1, _ = _kernels.single_steps(mu, m, a1, a2, v0, vm, v1, mid)
        same = np.sign(f1) == sgn_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    roots.extend((x0 + 0.5 * (lo + hi)).tolist())
    return roots


def nodal_set(config: ProblemConfig, n: int, mu: float | None = None,
              n_steps: int | None = None) -> NodalSet:
    """Interior zeros of the first component of eigenfunction n.

    The zero count must equal n; if the sampling grid misses a pair of close
    zeros, the grid doubles once before reporting a count mismatch.
    """
    if n < 1:
        raise ValueError("index n must be a positive integer")
    mu_val = float(mu) if mu is not None else eigenvalue_near(config, n, n_steps)
    tol = 1e-12 * PI
    base = n_steps if n_steps is not None else steps_for(mu_val)
    found = None
    for factor in (1, 2):
        traj = integrate(config, mu_val, base * factor)
        roots = []
        for xs, y1s, y2s in (traj.left, traj.right):
            roots.extend(_refine_half(config, mu_val, xs, y1s, y2s, tol))
        roots = sorted(r for r in roots if 0.0 < r < PI)
        # the jump scales the component by a positive factor, so a zero at the
        # seam shows up from both sides; collapse near-duplicates
        dedup = []
        for r in roots:
            if not dedup or r - dedup[-1] > 1e-9:
                dedup.append(r)
        found = dedup
        if len(found) == n:
            return NodalSet(n=n, mu_n=mu_val, nodes=np.array(found))
    raise NodeCountMismatch(expected=n, found=len(found))


def _cumulative_kernels(mu, xs, y1, y2, p, q, h):
    """Running integrals of {cos, sin}(mu t) times the weighted components."""
    c = np.cos(mu * xs)
    s = np.sin(mu * xs)
    c1 = cumulative_simpson(c * y1 * p, dx=h, initial=0.0)
    s1 = cumulative_simpson(s * y1 * p, dx=h, initial=0.0)
    c2 = cumulative_simpson(c * y2 * q, dx=h, initial=0.0)
    s2 = cumulative_simpson(s * y2 * q, dx=h, initial=0.0)
    return c1, s1, c2, s2


def integral_residual(config: ProblemConfig, traj: Trajectory, parts: bool = False):
    """Defect of the trajectory in the equivalent integral representation.

    Returns the max-norm mismatch over the stored grid; with parts=True the
    left and right half maxima come back separately.  Small values tie the
    propagated solution to the representation the expansions are built from.
    """
    mu = traj.mu
    m = config.mass
    th = config.theta
    h = PI_HALF / traj.n_steps
    xl, l1, l2 = traj.left
    xr, r1, r2 = traj.right
    pl = np.asarray(config.V(xl), dtype=float) + m
    ql = np.asarray(config.V(xl), dtype=float) - m
    pr = np.asarray(config.V(xr), dtype=float) + m
    qr = np.asarray(config.V(xr), dtype=float) - m

    c1, s1, c2, s2 = _cumulative_kernels(mu, xl, l1, l2, pl, ql, h)
    cx = np.cos(mu * xl)
    sx = np.sin(mu * xl)
    int_sin_1 = cx * s1 - sx * c1   # integral of sin(mu(t-x)) y1 p
    int_cos_1 = cx * c1 + sx * s1
    int_sin_2 = cx * s2 - sx * c2
    int_cos_2 = cx * c2 + sx * s2
    res1 = np.cos(mu * xl - th) - int_sin_1 + int_cos_2 - l1
    res2 = np.sin(mu * xl - th) - int_cos_1 - int_sin_2 - l2
    left = float(max(np.max(np.abs(res1)), np.max(np.abs(res2))))

    sp = config.sigma_plus
    sm = config.sigma_minus
    c1t, s1t, c2t, s2t = c1[-1], s1[-1], c2[-1], s2[-1]
    rc1, rs1, rc2, rs2 = _cumulative_kernels(mu, xr, r1, r2, pr, qr, h)
    cxr = np.cos(mu * xr)
    sxr = np.sin(mu * xr)
    cxm = np.cos(mu * (PI - xr))
    sxm = np.sin(mu * (PI - xr))
    # kernels against the left-half totals
    sin_x_1 = cxr * s1t - sxr * c1t        # sin(mu(t-x)) y1 p over the left half
    sin_m_1 = cxm * s1t - sxm * c1t        # sin(mu(x+t-pi)) y1 p over the left half
    cos_x_1 = cxr * c1t + sxr * s1t
    cos_m_1 = cxm * c1t + sxm * s1t
    sin_x_2 = cxr * s2t - sxr * c2t
    sin_m_2 = cxm * s2t - sxm * c2t
    cos_x_2 = cxr * c2t + sxr * s2t
    cos_m_2 = cxm * c2t + sxm * s2t
    # local integrals from the jump point
    loc_sin_1 = cxr * rs1 - sxr * rc1
    loc_cos_1 = cxr * rc1 + sxr * rs1
    loc_sin_2 = cxr * rs2 - sxr * rc2
    loc_cos_2 = cxr * rc2 + sxr * rs2
    res1 = (
        sp * np.cos(mu * xr - th) + sm * np.cos(mu * (PI - xr) - th)
        - (sp * sin_x_1 + sm * sin_m_1)
        + (sp * cos_x_2 + sm * cos_m_2)
        - loc_sin_1 + loc_cos_2 - r1
    )
    res2 = (
        sp * np.sin(mu * xr - th) - sm * np.sin(mu * (PI - xr) - th)
        - (sp * cos_x_1 - sm * cos_m_1)
        - (sp * sin_x_2 - sm * sin_m_2)
        - loc_cos_1 - loc_sin_2 - r2
    )
    right = float(max(np.max(np.abs(res1)), np.max(np.abs(res2))))
    if parts:
        return left, right
    return max(left, right)
