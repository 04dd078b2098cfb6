"""Large-parameter expansions for the jump system.

Covers the two-term solution expansions on both sides of the jump, the
characteristic-function expansion, approximate eigenvalue locations, node
location series, and the closed-form limit functions the inverse stage fits
against.

Two conventions are shipped for every node-level formula, selected by a
``mode`` string:

``"paper"``
    The tangent-linearized forms: constant first-order offset -cot(theta) on
    the left, a ratio of jump constants on the right, and second-order terms
    carrying csc^2(theta) factors.
``"consistent"``
    The exact-arctangent forms: offset theta - pi/2 on the left, the
    principal arctangent of the same ratio on the right, and second-order
    terms {m sin(theta) cos(theta), m^2 x / 2}.  This is the convention the
    fixed-step solver validates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateDenominator
from .model import PI, PI_HALF, ComponentPair, ProblemConfig

MODES = ("paper", "consistent")


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def _parity(n: int) -> float:
    return -1.0 if n % 2 else 1.0


def principal_band(v: float) -> float:
    """Reduce an angle mod pi into the half-open band (-pi/2, pi/2]."""
    return PI_HALF - (PI_HALF - v) % PI


def mu_zero(config: ProblemConfig, n: int) -> float:
    """First-order eigenvalue location for index n.

    n - (beta - theta)/pi + ((-1)^n / pi) * arcsin(gamma).
    """
    return float(n) - (config.beta - config.theta) / PI + _parity(n) * config.arcsin_gamma / PI


def psi_asymptotic(config: ProblemConfig, x: float, mu: float) -> ComponentPair:
    """Two-term expansion of the normalized solution at a point.

    Valid for large |mu|; the point must not sit exactly on the jump, where
    only one-sided values exist.
    """
    if x == PI_HALF:
        raise ValueError("expansion is one-sided at the jump point; pass x on either side")
    th = config.theta
    m = config.mass
    a = mu * x - config.rho(x)
    if x < PI_HALF:
        p1 = (
            math.cos(a - th)
            + (m * math.sin(th) / mu) * math.sin(a)
            + (m * m * x / (2.0 * mu)) * math.sin(a - th)
        )
        p2 = (
            math.sin(a - th)
            - (m * math.cos(th) / mu) * math.sin(a)
            - (m * m * x / (2.0 * mu)) * math.cos(a - th)
        )
        return ComponentPair(p1, p2)
    sp = config.sigma_plus
    sm = config.sigma_minus
    c = a - mu * PI + 2.0 * config.rho_half
    p1 = (
        sp * math.cos(a - th)
        + sm * math.cos(c + th)
        + (sp * m * math.sin(th) / mu) * math.sin(a)
        - (sm * m * math.sin(th) / mu) * math.sin(c)
        + (sp * m * m * x / (2.0 * mu)) * math.sin(a - th)
        - (sm * m * m * (PI - x) / (2.0 * mu)) * math.sin(c + th)
    )
    p2 = (
        sp * math.sin(a - th)
        + sm * math.sin(c + th)
        - (sp * m * math.cos(th) / mu) * math.sin(a)
        + (sm * m * math.sin(th) / mu) * math.sin(c)
        - (sp * m * m * x / (2.0 * mu)) * math.cos(a - th)
        + (sm * m * m * (PI - x) / (2.0 * mu)) * math.cos(c + th)
    )
    return ComponentPair(p1, p2)


def delta_asymptotic(config: ProblemConfig, mu):
    """Two-term expansion of the characteristic function at the far boundary."""
    mu = np.asarray(mu, dtype=float)
    th = config.theta
    be = config.beta
    m = config.mass
    sp = config.sigma_plus
    sm = config.sigma_minus
    r2 = 2.0 * config.rho_half
    out = (
        sp * np.sin(mu * PI - th + be)
        + sm * math.sin(r2 + th + be)
        - (sp * m / mu) * math.cos(th + be) * np.sin(mu * PI)
        + (sm * m / mu) * (math.cos(be) - math.cos(th)) * math.sin(th) * math.sin(r2)
        - (sp * m * m * PI / (2.0 * mu)) * np.cos(mu * PI - th + be)
    )
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class StarConstants:
    """Node-series constants on the right of the jump for one index parity."""

    parity: int
    b: float
    g: float
    t1: float
    t2: float
    m_term: float


def star_constants(config: ProblemConfig, x: float, n: int) -> StarConstants:
    """Evaluate the right-half series constants at x for the parity of n."""
    s = _parity(n)
    th = config.theta
    m = config.mass
    sp = config.sigma_plus
    sm = config.sigma_minus
    b = config.beta - s * config.arcsin_gamma + 2.0 * config.rho_half
    g = -sp * math.cos(th) - sm * s * math.cos(b)
    t1 = sp * math.sin(th) + sm * s * math.sin(b)
    t2 = (
        sp * m * math.sin(th)
        + sm * m * math.sin(th) * s * math.cos(b)
        + 0.5 * sp * m * m * x * math.cos(th)
        + 0.5 * sm * m * m * (PI - x) * s * math.cos(b)
    )
    m_term = (
        s * sm * m * math.sin(th) * math.sin(b)
        + 0.5 * sp * m * m * x * math.sin(th)
        + 0.5 * s * sm * m * m * (PI - x) * math.sin(b)
    )
    return StarConstants(parity=int(s), b=b, g=g, t1=t1, t2=t2, m_term=m_term)


def _offset_right(config: ProblemConfig, mode: str, b: float) -> float:
    """First-order node offset past the jump, for phase constant b."""
    sp = config.sigma_plus
    sm = config.sigma_minus
    th = config.theta
    g = -sp * math.cos(th) - sm * math.cos(b)
    if mode == "paper":
        t1 = sp * math.sin(th) + sm * math.sin(b)
        if abs(t1) < 1e-12:
            raise DegenerateDenominator("right-half offset denominator vanishes")
        return g / t1
    t1c = sp * math.sin(th) - sm * math.sin(b)
    if abs(t1c) < 1e-12 and abs(g) < 1e-12:
        raise DegenerateDenominator("right-half offset direction undefined")
    off = math.atan2(g, t1c)
    return principal_band(off)


def _offset_left(config: ProblemConfig, mode: str) -> float:
    if mode == "paper":
        return -1.0 / math.tan(config.theta)
    return config.theta - PI_HALF


def phi_closed(config: ProblemConfig, x: float, mode: str, side: Optional[str] = None) -> float:
    """First-order limit function: rho(x) + c*x plus a constant side offset.

    side overrides the positional split, which is needed to evaluate the
    one-sided values at the jump point itself.
    """
    _check_mode(mode)
    if side is None:
        side = "left" if x < PI_HALF else "right"
    base = config.rho(x) + config.c_even * x
    if side == "left":
        return base + _offset_left(config, mode)
    b = config.beta - config.arcsin_gamma + 2.0 * config.rho_half
    return base + _offset_right(config, mode, b)


def psi_closed(config: ProblemConfig, x: float, mode: str, side: Optional[str] = None) -> float:
    """Second-order limit function.

    The consistent variant is only defined left of the jump; the right-half
    second-order constants are not shipped in that convention.
    """
    _check_mode(mode)
    if side is None:
        side = "left" if x < PI_HALF else "right"
    c = config.c_even
    th = config.theta
    m = config.mass
    if mode == "consistent":
        if side != "left":
            raise ValueError("consistent-mode second-order form is left-half only")
        return (
            c * (config.rho(x) + th - PI_HALF)
            + m * math.sin(th) * math.cos(th)
            + 0.5 * m * m * x
        )
    if side == "left":
        cot = 1.0 / math.tan(th)
        csc2 = 1.0 / (math.sin(th) ** 2)
        return c * config.rho(x) + c * cot + m * cot + 0.5 * m * m * x * csc2
    sc = star_constants(config, x, 2)
    if abs(sc.t1) < 1e-12:
        raise DegenerateDenominator("right-half second-order denominator vanishes")
    return c * sc.g / sc.t1 - sc.g * sc.t2 / (sc.t1 * sc.t1) + sc.m_term / sc.t1


@dataclass(frozen=True)
class LimitFunctions:
    """Bundle of closed-form limit functions for one convention."""

    mode: str
    c: float
    k_left: float
    k_right: float
    phi_left: Callable[[float], float]
    phi_right: Callable[[float], float]
    psi_left: Callable[[float], float]
    psi_right: Optional[Callable[[float], float]]


def limit_functions(config: ProblemConfig, mode: str) -> LimitFunctions:
    _check_mode(mode)
    b = config.beta - config.arcsin_gamma + 2.0 * config.rho_half
    psi_r = None
    if mode == "paper":
        psi_r = lambda x: psi_closed(config, x, "paper", side="right")
    return LimitFunctions(
        mode=mode,
        c=config.c_even,
        k_left=_offset_left(config, mode),
        k_right=_offset_right(config, mode, b),
        phi_left=lambda x: phi_closed(config, x, mode, side="left"),
        phi_right=lambda x: phi_closed(config, x, mode, side="right"),
        psi_left=lambda x: psi_closed(config, x, mode, side="left"),
        psi_right=psi_r,
    )


def _series_pass_paper(config, n, j, x):
    a = j * PI / n
    s = _parity(n)
    cn = (config.beta - config.theta - s * config.arcsin_gamma) / PI
    th = config.theta
    m = config.mass
    r = config.rho(min(max(x, 0.0), PI))
    if x < PI_HALF:
        cot = 1.0 / math.tan(th)
        csc2 = 1.0 / (math.sin(th) ** 2)
        second = cn * r + m * cot + cn * cot + 0.5 * m * m * x * csc2
        return a + cn * a / n + (r - cot) / n + second / (n * n)
    sc = star_constants(config, x, n)
    if abs(sc.t1) < 1e-12:
        raise DegenerateDenominator("right-half series denominator vanishes")
    second = cn * r + cn * sc.g / sc.t1 - sc.g * sc.t2 / (sc.t1 * sc.t1) + sc.m_term / sc.t1
    return a + cn * a / n + (r + sc.g / sc.t1) / n + second / (n * n)


def _consistent_pass(config, mu, j, x):
    """Exact-arctangent leading root near j*pi plus one Newton correction."""
    th = config.theta
    m = config.mass
    r = config.rho(min(max(x, 0.0), PI))
    if x < PI_HALF:
        ap, am, d = 1.0, 0.0, 0.0
    else:
        ap, am = config.sigma_plus, config.sigma_minus
        d = mu * PI - 2.0 * config.rho_half
    v_re = ap * math.cos(th) + am * math.cos(th - d)
    v_im = -ap * math.sin(th) + am * math.sin(th - d)
    base = PI_HALF - math.atan2(v_im, v_re)
    phi = j * PI + principal_band(base - j * PI)

    def f_and_fp(p):
        f = (
            ap * math.cos(p - th)
            + am * math.cos(p - d + th)
            + (ap * m * math.sin(th) / mu) * math.sin(p)
            - (am * m * math.sin(th) / mu) * math.sin(p - d)
            + (ap * m * m * x / (2.0 * mu)) * math.sin(p - th)
            - (am * m * m * (PI - x) / (2.0 * mu)) * math.sin(p - d + th)
        )
        fp = (
            -ap * math.sin(p - th)
            - am * math.sin(p - d + th)
            + (ap * m * math.sin(th) / mu) * math.cos(p)
            - (am * m * math.sin(th) / mu) * math.cos(p - d)
            + (ap * m * m * x / (2.0 * mu)) * math.cos(p - th)
            - (am * m * m * (PI - x) / (2.0 * mu)) * math.cos(p - d + th)
        )
        return f, fp

    f, fp = f_and_fp(phi)
    if abs(fp) > 1e-8:
        phi = phi - f / fp
    return (phi + r) / mu


def node_asymptotic(config: ProblemConfig, n: int, j: int, mode: str) -> float:
    """Series location of the j-th node of the n-th eigenfunction.

    Implicit quantities (the running integral at the node, the node itself in
    second-order terms) are resolved by two fixed-point passes from the seed
    j*pi/n.  Meaningful labels are j in 1..n; the formula is evaluated as
    given for other j.
    """
    _check_mode(mode)
    if n < 1:
        raise ValueError("index n must be a positive integer")
    x = j * PI / n
    if mode == "paper":
        for _ in range(2):
            x = _series_pass_paper(config, n, j, x)
        return x
    mu = mu_zero(config, n)
    for _ in range(2):
        x = _consistent_pass(config, mu, j, x)
    return x


def series_nodes(
    n: int,
    rho_fn: Callable[[float], float],
    c: float,
    k_left: float,
    psi_left: Callable[[float], float],
    k_right: float,
    psi_right: Callable[[float], float],
    passes: int = 8,
) -> np.ndarray:
    """Generate all n node locations from first/second-order limit data.

    Evaluates x = j*pi/n + c*(j*pi/n)/n + (rho(x) + K_side)/n + Psi_side(x)/n^2
    for j = 1..n, resolving the implicit x by fixed-point iteration and
    choosing the side of the jump from the current iterate.
    """
    out = np.empty(n)
    for j in range(1, n + 1):
        a = j * PI / n
        x = a
        for _ in range(passes):
            xc = min(max(x, 0.0), PI)  # iterates may overshoot the ends before settling
            if x < PI_HALF:
                x = a + c * a / n + (rho_fn(xc) + k_left) / n + psi_left(xc) / (n * n)
            else:
                x = a + c * a / n + (rho_fn(xc) + k_right) / n + psi_right(xc) / (n * n)
        out[j - 1] = x
    if np.any(out <= 0.0) or np.any(out >= PI) or np.any(np.diff(out) <= 0.0):
        raise ValueError(f"generated series nodes are not sorted interior points for n={n}")
    return out
