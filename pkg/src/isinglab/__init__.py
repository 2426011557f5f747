"""Lattice spin-model toolkit.

Finite-box Ising and Potts models with three mutually checking routes to the
same physics: exact enumeration of small systems, Monte Carlo samplers for
larger ones, and closed-form d=2 results.  Cluster/interface geometry, the
high-temperature covariance/cumulant machinery, and a CLI with reproducible
CSV/JSON/PGM output round out the package.
"""

from .analytic import (T_C_ISING, CriticalPoint, critical_point,
                       critical_temperature, onsager_exponent_fit,
                       onsager_magnetization, tanh_reparam)
from .clusters import (ClusterPartition, Interface, decompose,
                       dobrushin_interface, interface, interface_census,
                       peierls_weight_check)
from .exact import (EnergyHistogram, EnumerationTable, enumerate_table,
                    free_energy_profile, free_measure_vs_mixture,
                    odd_correlation_zero)
from .lattice import BoundaryCondition, Lattice
from .mcmc import (Chain, Estimate, Observable, abs_magnetization,
                   chain_seed, estimate, estimate_many, magnetization,
                   spin, spin_product, temperature_sweep)
from .model import (ModelParams, SpinConfig, boltzmann_log_weight, energy,
                    energy_delta_flip)

__all__ = [
    "BoundaryCondition", "Lattice", "ModelParams", "SpinConfig",
    "boltzmann_log_weight", "energy", "energy_delta_flip",
    "EnumerationTable", "EnergyHistogram", "enumerate_table",
    "free_energy_profile", "free_measure_vs_mixture", "odd_correlation_zero",
    "ClusterPartition", "Interface", "decompose", "interface",
    "interface_census", "dobrushin_interface", "peierls_weight_check",
    "CriticalPoint", "T_C_ISING", "critical_point", "critical_temperature",
    "onsager_exponent_fit", "onsager_magnetization", "tanh_reparam",
    "Chain", "Estimate", "Observable", "abs_magnetization", "chain_seed",
    "estimate", "estimate_many", "magnetization", "spin", "spin_product",
    "temperature_sweep",
]

__version__ = "0.1.0"
