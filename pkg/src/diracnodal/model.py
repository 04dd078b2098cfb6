"""Problem description for the forward and inverse solvers.

A problem is a potential V on [0, pi] (mean-normalized), a mass m, boundary
angles theta and beta, and a positive jump factor sigma applied to the first
component at the interior point pi/2.  The first solution component scales by
sigma across the jump and the second by 1/sigma, so the Wronskian-like product
is preserved.

Potentials carry exact antiderivatives so the running integral rho(x) used by
every asymptotic formula has no quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .errors import ConfigError

PI = math.pi
PI_HALF = math.pi / 2.0

_KINDS = ("cos", "sin", "poly", "table")


class ComponentPair(NamedTuple):
    y1: float
    y2: float


@dataclass(frozen=True)
class PotentialSpec:
    """Potential on [0, pi] with a closed-form antiderivative.

    Parameters
    ----------
    kind : str
        One of "cos", "sin", "poly", "table".
    amplitude : float
        Prefactor for the trigonometric kinds.
    coeffs : tuple of float
        Polynomial coefficients, low order first.
    knots, values : tuple of float
        Strictly increasing abscissae covering [0, pi] and the sampled
        values; evaluation is linear interpolation between knots.
    shift : float
        Constant subtracted everywhere so the mean over [0, pi] vanishes.
        Filled in by validate_config, not by callers.
    """

    kind: str
    amplitude: float = 1.0
    coeffs: tuple = ()
    knots: tuple = ()
    values: tuple = ()
    shift: float = 0.0

    def _raw(self, x):
        if self.kind == "cos":
            return self.amplitude * np.cos(x)
        if self.kind == "sin":
            return self.amplitude * np.sin(x)
        if self.kind == "poly":
            if not self.coeffs:
                return np.zeros_like(np.asarray(x, dtype=float))
            return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), np.asarray(self.coeffs))
        if self.kind == "table":
            return np.interp(x, self.knots, self.values)
        raise ConfigError(f"unknown potential kind {self.kind!r}")

    def _raw_antiderivative(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "cos":
            return self.amplitude * np.sin(x)
        if self.kind == "sin":
            return self.amplitude * (1.0 - np.cos(x))
        if self.kind == "poly":
            if not self.coeffs:
                return np.zeros_like(x)
            c = np.asarray(self.coeffs, dtype=float)
            cint = c / np.arange(1, c.size + 1)
            return x * np.polynomial.polynomial.polyval(x, cint)
        if self.kind == "table":
            t, v, cum = self._table_arrays
            idx = np.clip(np.searchsorted(t, x, side="right") - 1, 0, t.size - 2)
            dx = x - t[idx]
            slope = (v[idx + 1] - v[idx]) / (t[idx + 1] - t[idx])
            return cum[idx] + v[idx] * dx + 0.5 * slope * dx * dx
        raise ConfigError(f"unknown potential kind {self.kind!r}")

    @cached_property
    def _table_arrays(self):
        t = np.asarray(self.knots, dtype=float)
        v = np.asarray(self.values, dtype=float)
        seg = 0.5 * (v[1:] + v[:-1]) * np.diff(t)
        cum = np.concatenate(([0.0], np.cumsum(seg)))
        return t, v, cum

    def raw_mean(self):
        """Mean of the unshifted potential over [0, pi]."""
        return float(self._raw_antiderivative(PI)) / PI

    def __call__(self, x):
        return self._raw(x) - self.shift

    def antiderivative(self, x):
        """Integral of the shifted potential from 0 to x."""
        return self._raw_antiderivative(x) - self.shift * np.asarray(x, dtype=float)

    def to_json(self):
        if self.kind in ("cos", "sin"):
            return {"kind": self.kind, "amplitude": self.amplitude}
        if self.kind == "poly":
            return {"kind": "poly", "coeffs": list(self.coeffs)}
        return {"kind": "table", "x": list(self.knots), "values": list(self.values)}


@dataclass(frozen=True)
class JumpConstants:
    """Derived constants of the interior jump and boundary data."""

    sigma_plus: float
    sigma_minus: float
    gamma: float
    arcsin_gamma: float
    c_even: float


@dataclass(frozen=True)
class ProblemConfig:
    theta: float
    beta: float
    sigma: float
    mass: float
    V: PotentialSpec
    notes: tuple = ()

    @cached_property
    def sigma_plus(self):
        return 0.5 * (self.sigma + 1.0 / self.sigma)

    @cached_property
    def sigma_minus(self):
        return 0.5 * (self.sigma - 1.0 / self.sigma)

    @cached_property
    def rho_half(self):
        return float(self.V.antiderivative(PI_HALF))

    @cached_property
    def gamma(self):
        return -(self.sigma_minus / self.sigma_plus) * math.sin(
            2.0 * self.rho_half + self.theta + self.beta
        )

    @cached_property
    def arcsin_gamma(self):
        return math.asin(self.gamma)

    @cached_property
    def c_even(self):
        return (self.beta - self.theta - self.arcsin_gamma) / PI

    def rho(self, x):
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr < -1e-12) or np.any(x_arr > PI + 1e-12):
            raise ValueError("rho is defined on [0, pi]")
        out = self.V.antiderivative(x_arr)
        return float(out) if np.isscalar(x) else out

    def rho1(self, x):
        return self.rho(x) - self.rho_half

    def initial_values(self):
        return ComponentPair(math.cos(self.theta), -math.sin(self.theta))

    def to_json(self):
        return {
            "theta": self.theta,
            "beta": self.beta,
            "sigma": self.sigma,
            "mass": self.mass,
            "potential": self.V.to_json(),
        }


def rho(config: ProblemConfig, x):
    """Running integral of the potential from 0 to x."""
    return config.rho(x)


def rho1(config: ProblemConfig, x):
    """rho recentered at the jump point: rho(x) - rho(pi/2)."""
    return config.rho1(x)


def jump_constants(config: ProblemConfig) -> JumpConstants:
    """Constants derived from sigma and the boundary angles.

    sigma_plus**2 - sigma_minus**2 == 1 holds for every positive sigma, and
    |gamma| < 1 follows because |sigma_minus| < sigma_plus.
    """
    return JumpConstants(
        sigma_plus=config.sigma_plus,
        sigma_minus=config.sigma_minus,
        gamma=config.gamma,
        arcsin_gamma=config.arcsin_gamma,
        c_even=config.c_even,
    )


def _build_potential(data) -> PotentialSpec:
    if isinstance(data, PotentialSpec):
        data = data.to_json()
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("potential must be an object with a 'kind' field")
    kind = data["kind"]
    if kind not in _KINDS:
        raise ConfigError(f"potential kind must be one of {_KINDS}, got {kind!r}")
    if kind in ("cos", "sin"):
        amp = float(data.get("amplitude", 1.0))
        if not math.isfinite(amp):
            raise ConfigError("potential amplitude must be finite")
        return PotentialSpec(kind=kind, amplitude=amp)
    if kind == "poly":
        coeffs = tuple(float(c) for c in data.get("coeffs", ()))
        if any(not math.isfinite(c) for c in coeffs):
            raise ConfigError("polynomial coefficients must be finite")
        return PotentialSpec(kind="poly", coeffs=coeffs)
    knots = tuple(float(t) for t in data.get("x", ()))
    values = tuple(float(v) for v in data.get("values", ()))
    if len(knots) != len(values) or len(knots) < 2:
        raise ConfigError("table potential needs matching x/values arrays, length >= 2")
    if any(b <= a for a, b in zip(knots, knots[1:])):
        raise ConfigError("table knots must be strictly increasing")
    if knots[0] > 1e-9 or knots[-1] < PI - 1e-9:
        raise ConfigError("table knots must cover [0, pi]")
    if any(not math.isfinite(v) for v in values):
        raise ConfigError("table values must be finite")
    return PotentialSpec(kind="table", knots=knots, values=values)


def validate_config(data) -> ProblemConfig:
    """Check a raw problem description and return the normalized config.

    Accepts a mapping with keys theta, beta, sigma, mass, potential (or an
    existing ProblemConfig, which is re-validated).  The potential is shifted
    by its mean over [0, pi] so the running integral vanishes at pi; the
    applied shift is recorded in the notes.

    Raises
    ------
    ConfigError
        If an angle leaves (0, pi), sigma is not positive, or the potential
        table is malformed.
    """
    if isinstance(data, ProblemConfig):
        data = data.to_json()
    try:
        theta = float(data["theta"])
        beta = float(data["beta"])
        sigma = float(data["sigma"])
        mass = float(data["mass"])
        pot_raw = data["potential"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"config missing or malformed field: {exc}") from exc

    for name, val in (("theta", theta), ("beta", beta)):
        if not math.isfinite(val) or not (0.0 < val < PI):
            raise ConfigError(f"{name} must lie strictly inside (0, pi), got {val}")
    if abs(math.sin(theta)) < 1e-9:
        raise ConfigError("sin(theta) is too small; boundary data degenerates")
    if not math.isfinite(sigma) or sigma <= 0.0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    if not math.isfinite(mass):
        raise ConfigError("mass must be finite")

    pot = _build_potential(pot_raw)
    notes = []
    mean = pot.raw_mean()
    if abs(mean) > 1e-14:
        pot = PotentialSpec(
            kind=pot.kind,
            amplitude=pot.amplitude,
            coeffs=pot.coeffs,
            knots=pot.knots,
            values=pot.values,
            shift=mean,
        )
        notes.append(f"potential shifted by its mean {mean:.6e} to normalize")
    if abs(math.cos(theta)) < 1e-9:
        notes.append("theta at pi/2: cot(theta)-based closed forms degenerate")

    return ProblemConfig(
        theta=theta, beta=beta, sigma=sigma, mass=mass, V=pot, notes=tuple(notes)
    )
