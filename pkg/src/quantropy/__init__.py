"""Quantropy: complex-weighted history ensembles and the statistical-mechanics analogy.

The functional API lives in the submodules; the most used names are
re-exported here.
"""

from .ensemble import (
    Classicality,
    ComplexEnsemble,
    EnsembleReport,
    HistorySpace,
    expected_action,
    expected_action_via_derivative,
    feynman_weights,
    log_partition,
    product_space,
    quantropy,
    report,
)
from .estimators import BoltzmannEnsemble, FeynmanEnsemble
from .exceptions import (
    AmplitudeNearZero,
    DivergentIntegral,
    InvalidInput,
    NoConvergence,
    NonFiniteAction,
    QuantropyError,
    SizeOverflow,
    StepTooLarge,
    ZeroPartitionFunction,
)
from .freeparticle import FreeParticleModel, QuadraticAction, closed_report, quadratic_action_report
from .oscillatory import RegulatorSpec, gaussian_closed_form, gaussian_regularized
from .stationarity import directional_stationarity, lagrange_residual
from .thermo import ThermalReport, boltzmann_report, check_analogy, ideal_gas_expected_energy

__version__ = "0.1.0"
