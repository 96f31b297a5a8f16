"""Thomas-Fermi, Vlasov and semi-classical phase-space tools for fermions in the mean-field regime."""
from .errors import CapacityError, ConfigurationError, IterationError, PreconditionError
from .fields import ExternalFields
from .phasespace import Density, PhaseGrid, PhaseSpaceMeasure, Scaling, SpatialGrid, fourier_hbar, integrate
from .spectral import OneBodyDensityMatrix, OneBodyOperator, build_magnetic_dirichlet, lowest_n_projector, weyl_report
from .tf import TFProblem, TFSolution, build_m_rho, c_tf, tf_energy, tf_minimize

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConfigurationError",
    "Density",
    "ExternalFields",
    "IterationError",
    "OneBodyDensityMatrix",
    "OneBodyOperator",
    "PhaseGrid",
    "PhaseSpaceMeasure",
    "PreconditionError",
    "Scaling",
    "SpatialGrid",
    "TFProblem",
    "TFSolution",
    "build_m_rho",
    "build_magnetic_dirichlet",
    "c_tf",
    "fourier_hbar",
    "integrate",
    "lowest_n_projector",
    "tf_energy",
    "tf_minimize",
    "weyl_report",
]
