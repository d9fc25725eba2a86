"""Bloch oscillation dynamics on non-Hermitian tight-binding chains.

A single-band lattice with independent left/right hopping amplitudes and a
linear potential, propagated three independent ways (direct integration,
Bessel closed forms for the preset hopping patterns, an exponential-product
propagator), reduced to Gaussian quasiclassics with norm tracking, and
approximated by point-particle ensembles and perturbative laws.  The
scenario runner cross-checks all of them against declared tolerances.
"""

from .bessel import bessel_i, bessel_i_log, bessel_j
from .classical import (
    CovarianceBlowupError,
    GaussianTrajectory,
    PerturbativeBreakdownError,
    beta_to_sigma,
    integrate_classical,
    narrow_limit_closed_form,
    narrow_limit_sigma_qq,
    perturbative_p,
    rhs_from_split,
    rhs_full,
    sigma_to_beta,
    trajectory_from_beta,
)
from .ensemble import (
    Ensemble,
    ensemble_averages,
    ensemble_density,
    ensemble_from_gaussian,
    ensemble_from_site,
    evolve_ensemble,
)
from .model import (
    HamiltonianSplit,
    ModelParams,
    dispersion,
    hamiltonian_split,
    identify_preset,
    kappa_grid,
    wannier_stark_eigenstate,
    wannier_stark_eigenvalue,
)
from .quantum import (
    LatticeState,
    QuantumObservables,
    TruncationLeakError,
    gaussian_state,
    observables,
    propagate_closed_form,
    propagate_direct,
    propagate_wei_norman,
    propagator_hn,
    propagator_ic,
    recommended_half_width,
    relative_amplitude_deviation,
    site_state,
    spectrum_truncated,
    unwrap_angles,
)
from .runner import run_scenario
from .scenario import Scenario, ScenarioError, load_scenario_file, resolve_scenarios

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ModelParams",
    "HamiltonianSplit",
    "dispersion",
    "hamiltonian_split",
    "identify_preset",
    "kappa_grid",
    "wannier_stark_eigenstate",
    "wannier_stark_eigenvalue",
    "bessel_j",
    "bessel_i",
    "bessel_i_log",
    "LatticeState",
    "QuantumObservables",
    "TruncationLeakError",
    "site_state",
    "gaussian_state",
    "observables",
    "unwrap_angles",
    "propagate_direct",
    "propagate_closed_form",
    "propagate_wei_norman",
    "propagator_hn",
    "propagator_ic",
    "spectrum_truncated",
    "relative_amplitude_deviation",
    "recommended_half_width",
    "GaussianTrajectory",
    "CovarianceBlowupError",
    "PerturbativeBreakdownError",
    "beta_to_sigma",
    "sigma_to_beta",
    "trajectory_from_beta",
    "rhs_full",
    "rhs_from_split",
    "integrate_classical",
    "narrow_limit_closed_form",
    "narrow_limit_sigma_qq",
    "perturbative_p",
    "Ensemble",
    "ensemble_from_site",
    "ensemble_from_gaussian",
    "evolve_ensemble",
    "ensemble_averages",
    "ensemble_density",
    "Scenario",
    "ScenarioError",
    "load_scenario_file",
    "resolve_scenarios",
    "run_scenario",
]
