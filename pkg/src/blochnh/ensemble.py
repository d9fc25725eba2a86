"""Incoherent point-particle ensembles.

Narrow packets are handled by one Gaussian trajectory; states that are
broad in momentum (a single occupied site is the extreme case) are not.
The ensemble picture replaces such a state with many independent point
particles, one per initial momentum on a uniform grid, weighted by the
squared modulus of the state's momentum-space amplitude.  Each member
follows the zero-variance closed-form motion, including its own norm
factor, and observables are weight averages with the time-dependent norms
folded in.

Everything here is deterministic: the momentum grid is uniform, there is
no sampling, and two runs produce identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import narrow_limit_closed_form
from .model import ModelParams
from .quantum import _K_MEAN_FLOOR, LatticeState, observables

__all__ = [
    "Ensemble",
    "EnsembleSnapshot",
    "EnsembleAverages",
    "ensemble_from_site",
    "ensemble_from_gaussian",
    "evolve_ensemble",
    "ensemble_averages",
    "ensemble_density",
]

MIN_MEMBERS = 16


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Member initial conditions: momenta, positions, and weights (sum 1)."""

    p0: np.ndarray
    q0: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        p0 = np.asarray(self.p0, dtype=float)
        q0 = np.asarray(self.q0, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if not (p0.shape == q0.shape == w.shape) or p0.ndim != 1:
            raise ValueError("p0, q0 and weights must be 1-D arrays of equal length")
        if p0.size < MIN_MEMBERS:
            raise ValueError(f"need at least {MIN_MEMBERS} members, got {p0.size}")
        if not (np.all(np.isfinite(p0)) and np.all(np.isfinite(q0)) and np.all(np.isfinite(w))):
            raise ValueError("non-finite ensemble data")
        if np.any(w < 0.0):
            raise ValueError("weights must be non-negative")
        total = float(np.sum(w))
        if total <= 0.0:
            raise ValueError("weights must not all vanish")
        object.__setattr__(self, "p0", p0)
        object.__setattr__(self, "q0", q0)
        object.__setattr__(self, "weights", w / total)

    @property
    def member_count(self) -> int:
        return self.p0.size


def _momentum_grid(member_count: int) -> np.ndarray:
    member_count = int(member_count)
    if member_count < MIN_MEMBERS:
        raise ValueError(f"need at least {MIN_MEMBERS} members, got {member_count}")
    return 2.0 * math.pi * np.arange(member_count) / member_count


def ensemble_from_site(member_count: int, q0: float = 0.0) -> Ensemble:
    """Flat-weight ensemble for a single occupied site at q0.

    The momentum distribution of one site is uniform, so the members sit
    on the grid 2 pi j / M with equal weights.
    """
    p0 = _momentum_grid(member_count)
    return Ensemble(p0, np.full(p0.size, float(q0)), np.full(p0.size, 1.0 / p0.size))


def ensemble_from_gaussian(state: LatticeState, member_count: int) -> Ensemble:
    """Ensemble whose weights follow the state's momentum distribution.

    Weight at grid momentum p_j is |sum_n c_n e^{-i n p_j}|^2, evaluated
    with the true site index n; every member starts from the state's mean
    position.
    """
    p0 = _momentum_grid(member_count)
    amp_p = np.exp(-1j * np.outer(p0, state.sites())) @ state.amplitudes
    weights = np.abs(amp_p) ** 2
    q_mean = observables(state).n_mean
    return Ensemble(p0, np.full(p0.size, q_mean), weights)


@dataclass(frozen=True, eq=False)
class EnsembleSnapshot:
    """Member phase-space coordinates and norm logs at one time."""

    t: float
    p: np.ndarray
    q: np.ndarray
    log_norm_sq: np.ndarray
    weights0: np.ndarray


def evolve_ensemble(params: ModelParams, ensemble: Ensemble, t: float) -> EnsembleSnapshot:
    """All members advanced to time t along the point-particle motion."""
    p, q, log_norm = narrow_limit_closed_form(
        params, ensemble.q0, ensemble.p0, 0.0, float(t)
    )
    return EnsembleSnapshot(float(t), p, q, log_norm, ensemble.weights)


@dataclass(frozen=True)
class EnsembleAverages:
    """Weight-averaged observables of a snapshot.

    norm_total is the ensemble stand-in for the squared norm; q_var is
    the spread of member centers, recorded for diagnostics (it tracks the
    momentum variance of the source state only approximately).
    """

    norm_total: float
    log_norm_total: float
    q_mean: float
    k_mean: complex
    p_circular: float
    q_var: float


def ensemble_averages(snapshot: EnsembleSnapshot) -> EnsembleAverages:
    """Log-sum-exp averages; safe while member norms span hundreds of e-folds."""
    live = snapshot.weights0 > 0.0
    log_w = np.log(snapshot.weights0[live]) + snapshot.log_norm_sq[live]
    peak = float(np.max(log_w))
    total = float(np.sum(np.exp(log_w - peak)))
    log_norm_total = peak + math.log(total)
    try:
        norm_total = math.exp(log_norm_total)
    except OverflowError:
        norm_total = math.inf
    rel = np.exp(log_w - peak) / total
    q_live = snapshot.q[live]
    p_live = snapshot.p[live]
    q_mean = float(np.sum(rel * q_live))
    q_var = max(0.0, float(np.sum(rel * q_live**2)) - q_mean**2)
    k_mean = complex(np.sum(rel * np.exp(1j * p_live)))
    if abs(k_mean) < _K_MEAN_FLOOR:
        p_circular = math.nan
    else:
        p_circular = math.atan2(k_mean.imag, k_mean.real)
    return EnsembleAverages(norm_total, log_norm_total, q_mean, k_mean, p_circular, q_var)


def ensemble_density(snapshot: EnsembleSnapshot, window) -> np.ndarray:
    """Per-site probability from members binned at the nearest site.

    Members outside the window are dropped; the result is renormalized
    over the window, mirroring the renormalized wavefunction density it
    gets compared against.
    """
    n_min, n_max = int(window[0]), int(window[1])
    if n_max < n_min:
        raise ValueError(f"bad window [{n_min}, {n_max}]")
    live = snapshot.weights0 > 0.0
    log_w = np.log(snapshot.weights0[live]) + snapshot.log_norm_sq[live]
    peak = float(np.max(log_w))
    rel = np.exp(log_w - peak)
    sites = np.rint(snapshot.q[live]).astype(int)
    inside = (sites >= n_min) & (sites <= n_max)
    hist = np.bincount(sites[inside] - n_min, weights=rel[inside], minlength=n_max - n_min + 1)
    total = float(np.sum(hist))
    if total <= 0.0:
        raise ValueError("no ensemble weight inside the window")
    return hist / total
