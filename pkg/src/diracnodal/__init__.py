"""Forward and inverse nodal solver for a 1-D Dirac-type system with an
interior transmission jump.

The forward side propagates the boundary-value solution, finds eigenvalues
and nodal points, and checks them against two-term large-parameter
expansions.  The inverse side estimates the expansion limit functions from
dense nodal data and reconstructs the potential, the mass, and the boundary
angle.
"""

from .errors import (
    AuxInconsistent,
    ConfigError,
    DegenerateDenominator,
    DiracNodalError,
    InsufficientData,
    IntegrationOverflow,
    MultipleRootsAmbiguous,
    NegativeMassSquare,
    NodeCountMismatch,
    NoRootInWindow,
    NoStableShift,
    SideMismatch,
    ThetaOutOfRange,
)
from .model import (
    PI,
    PI_HALF,
    ComponentPair,
    JumpConstants,
    PotentialSpec,
    ProblemConfig,
    jump_constants,
    rho,
    rho1,
    validate_config,
)
from .forward import (
    NodalSet,
    Trajectory,
    delta,
    delta_batch,
    eigenvalue_near,
    integral_residual,
    integrate,
    nodal_set,
    spectrum,
)
from .asymptotics import (
    MODES,
    LimitFunctions,
    StarConstants,
    delta_asymptotic,
    limit_functions,
    mu_zero,
    node_asymptotic,
    phi_closed,
    principal_band,
    psi_asymptotic,
    psi_closed,
    series_nodes,
    star_constants,
)
from .inverse import (
    LimitEstimate,
    NodalDataset,
    NodalEntry,
    PhiAux,
    ReconstructionResult,
    dataset_from_forward,
    dataset_from_series,
    estimate_phi,
    estimate_psi,
    index_nodes,
    make_dataset,
    reconstruct,
    second_order_adjudication,
    validate_dataset,
)

__version__ = "0.1.0"
