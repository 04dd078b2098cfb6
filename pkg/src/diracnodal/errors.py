"""Exception types shared across the package.

Every error raised on a contract violation derives from DiracNodalError so
callers (and the CLI) can map failures to exit codes without string matching.
"""


class DiracNodalError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(DiracNodalError):
    """Rejected problem description (bad angles, sigma, potential table)."""


class IntegrationOverflow(DiracNodalError):
    """Non-finite values appeared during propagation."""


class NoRootInWindow(DiracNodalError):
    """Characteristic-function root search exhausted its window doublings."""


class MultipleRootsAmbiguous(DiracNodalError):
    """Two candidate roots are equidistant from the predicted location."""


class NodeCountMismatch(DiracNodalError):
    """Interior zero count disagrees with the eigenvalue index."""

    def __init__(self, expected, found, message=None):
        self.expected = expected
        self.found = found
        super().__init__(message or f"expected {expected} interior zeros, found {found}")


class InsufficientData(DiracNodalError):
    """Not enough usable indices in the dataset for the requested fit."""


class SideMismatch(DiracNodalError):
    """Probe point and the data used for it sit on opposite sides of the jump."""


class AuxInconsistent(DiracNodalError):
    """Second-stage estimate called with incomplete first-stage results."""


class NoStableShift(DiracNodalError):
    """Index calibration found no offset that aligns the largest datasets."""


class DegenerateDenominator(DiracNodalError):
    """A closed-form denominator is too close to zero to evaluate."""


class ThetaOutOfRange(DiracNodalError):
    """Recovered boundary angle falls outside the open interval (0, pi)."""


class NegativeMassSquare(DiracNodalError):
    """Second-order slope fit implies a negative squared mass."""
