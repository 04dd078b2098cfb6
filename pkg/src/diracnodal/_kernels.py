"""Compiled fixed-step propagation kernels.

The system is y1' = (V - m - mu) y2, y2' = (mu - V - m) y1 on a uniform grid
over one half-interval.  Potential values are precomputed at the grid points
and midpoints so a classical fourth-order step needs no function calls inside
the loop.  Batch variants run one lane per mu value in parallel.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True)
def _half_endpoint(mu, y1, y2, vg, vm, m, h):
    n = vm.shape[0]
    for k in range(n):
        a0 = vg[k] - m - mu
        b0 = mu - vg[k] - m
        a1 = vm[k] - m - mu
        b1 = mu - vm[k] - m
        a2 = vg[k + 1] - m - mu
        b2 = mu - vg[k + 1] - m
        k11 = a0 * y2
        k12 = b0 * y1
        p1 = y1 + 0.5 * h * k11
        p2 = y2 + 0.5 * h * k12
        k21 = a1 * p2
        k22 = b1 * p1
        p1 = y1 + 0.5 * h * k21
        p2 = y2 + 0.5 * h * k22
        k31 = a1 * p2
        k32 = b1 * p1
        p1 = y1 + h * k31
        p2 = y2 + h * k32
        k41 = a2 * p2
        k42 = b2 * p1
        y1 = y1 + h * (k11 + 2.0 * (k21 + k31) + k41) / 6.0
        y2 = y2 + h * (k12 + 2.0 * (k22 + k32) + k42) / 6.0
    return y1, y2


@njit(parallel=True, cache=True)
def half_endpoint_batch(mus, y1s, y2s, vg, vm, m, h, out1, out2):
    for i in prange(mus.shape[0]):
        r1, r2 = _half_endpoint(mus[i], y1s[i], y2s[i], vg, vm, m, h)
        out1[i] = r1
        out2[i] = r2


@njit(cache=True)
def half_store(mu, y1, y2, vg, vm, m, h, out1, out2):
    n = vm.shape[0]
    out1[0] = y1
    out2[0] = y2
    for k in range(n):
        a0 = vg[k] - m - mu
        b0 = mu - vg[k] - m
        a1 = vm[k] - m - mu
        b1 = mu - vm[k] - m
        a2 = vg[k + 1] - m - mu
        b2 = mu - vg[k + 1] - m
        k11 = a0 * y2
        k12 = b0 * y1
        p1 = y1 + 0.5 * h * k11
        p2 = y2 + 0.5 * h * k12
        k21 = a1 * p2
        k22 = b1 * p1
        p1 = y1 + 0.5 * h * k21
        p2 = y2 + 0.5 * h * k22
        k31 = a1 * p2
        k32 = b1 * p1
        p1 = y1 + h * k31
        p2 = y2 + h * k32
        k41 = a2 * p2
        k42 = b2 * p1
        y1 = y1 + h * (k11 + 2.0 * (k21 + k31) + k41) / 6.0
        y2 = y2 + h * (k12 + 2.0 * (k22 + k32) + k42) / 6.0
        out1[k + 1] = y1
        out2[k + 1] = y2


def single_steps(mu, m, y1, y2, v0, vmid, v1, h):
    """One vectorized classical step per lane from cached states.

    All array arguments share one shape (lanes); h may vary per lane.  Used
    by the node refinement bisection, which restarts every evaluation from
    the stored grid state so per-evaluation error stays at one-step size.
    """
    a0 = v0 - m - mu
    b0 = mu - v0 - m
    am = vmid - m - mu
    bm = mu - vmid - m
    a1 = v1 - m - mu
    b1 = mu - v1 - m
    k11 = a0 * y2
    k12 = b0 * y1
    p1 = y1 + 0.5 * h * k11
    p2 = y2 + 0.5 * h * k12
    k21 = am * p2
    k22 = bm * p1
    p1 = y1 + 0.5 * h * k21
    p2 = y2 + 0.5 * h * k22
    k31 = am * p2
    k32 = bm * p1
    p1 = y1 + h * k31
    p2 = y2 + h * k32
    k41 = a1 * p2
    k42 = b1 * p1
    r1 = y1 + h * (k11 + 2.0 * (k21 + k31) + k41) / 6.0
    r2 = y2 + h * (k12 + 2.0 * (k22 + k32) + k42) / 6.0
    return r1, r2
