"""Kinetic-theory closures: Chapman-Enskog moments, entropy-production selection, BGK simulation."""
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DegenerateDistributionError,
    DomainError,
    InsufficientSignalError,
    InvalidArgumentError,
    InvalidDistributionError,
    KinClosureError,
    NonConvexProducerError,
    NumericalConsistencyError,
    RealizabilityError,
)
from .quadrature import (
    DistributionGrid,
    GasConstants,
    MacroState,
    VelocityGrid,
    build_grid,
    conserved_moments,
    default_grid,
)
from .thermo import AffinitySet, FluxSet

__version__ = "0.1.0"
