"""Monte Carlo simulator for KMB09 discrete-variable QKD with homodyne
detection over a turbulent free-space channel, with a BB84 baseline."""

__version__ = "0.1.0"

from .channel import ChannelConfig, RotationNoiseConfig, TurbulenceConfig
from .experiment import ExperimentConfig, RunStats, efficiency_analytic, run_experiment, simulate
from .homodyne import HomodyneConfig
from .oracle import OracleResult, enumeration_oracle
from .states import BasisId, BasisSet, StateVector, build_bases

__all__ = [
    "BasisId",
    "BasisSet",
    "ChannelConfig",
    "ExperimentConfig",
    "HomodyneConfig",
    "OracleResult",
    "RotationNoiseConfig",
    "RunStats",
    "StateVector",
    "TurbulenceConfig",
    "build_bases",
    "efficiency_analytic",
    "enumeration_oracle",
    "run_experiment",
    "simulate",
]
