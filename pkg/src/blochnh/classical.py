"""Quasiclassical Gaussian-packet dynamics.

The quantum evolution of a broad packet is condensed into six real
numbers: phase-space center (q, p), covariance (sigma_pp, sigma_pq,
sigma_qq), and the log of the squared norm.  Their equations of motion
couple the center to the covariance through the non-Hermitian part of the
band function, which is what separates this regime from textbook
semiclassics.  Two independent writings of the right-hand side are kept:
the component form used by the integrator, and a matrix form built from
the Hamiltonian split.  They must agree to rounding on det Sigma = 1
states, and the tests hold them to that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import HamiltonianSplit, ModelParams, identify_preset

__all__ = [
    "GaussianTrajectory",
    "CovarianceBlowupError",
    "PerturbativeBreakdownError",
    "beta_to_sigma",
    "sigma_to_beta",
    "trajectory_from_beta",
    "rhs_full",
    "rhs_from_split",
    "det_sigma_drift",
    "integrate_classical",
    "narrow_limit_closed_form",
    "narrow_limit_sigma_qq",
    "perturbative_p",
]

_OMEGA = np.array([[0.0, -1.0], [1.0, 0.0]])

# Trajectories whose momentum variance passes this are treated as blown up;
# the quadratic growth term makes the true divergence finite-time, so there
# is no point integrating further.
SIGMA_PP_LIMIT = 1e6


class CovarianceBlowupError(RuntimeError):
    """Momentum variance diverged during integration."""


class PerturbativeBreakdownError(RuntimeError):
    """The perturbative variance denominator crossed zero."""


@dataclass(frozen=True)
class GaussianTrajectory:
    """Phase-space point of the Gaussian reduction at one time.

    sigma_* are the (co)variances in the (p, q) ordering used throughout;
    log_norm_sq tracks the squared norm of the underlying packet.  Point
    particles (ensemble members) are the degenerate case sigma_* = 0, so
    positivity of the covariance determinant is deliberately not enforced
    here.
    """

    q: float
    p: float
    sigma_pp: float
    sigma_pq: float
    sigma_qq: float
    log_norm_sq: float = 0.0

    def __post_init__(self):
        for name in ("q", "p", "sigma_pp", "sigma_pq", "sigma_qq", "log_norm_sq"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.sigma_pp < 0.0 or self.sigma_qq < 0.0:
            raise ValueError("variances must be non-negative")

    def sigma_matrix(self) -> np.ndarray:
        return np.array(
            [[self.sigma_pp, self.sigma_pq], [self.sigma_pq, self.sigma_qq]]
        )


def beta_to_sigma(beta: complex):
    """Covariances (sigma_pp, sigma_pq, sigma_qq) of exp(-beta (n-q0)^2 + ...).

    sigma_qq = 1/(2 Re beta), sigma_pq = -Im beta / Re beta, and sigma_pp
    is fixed by the minimum-uncertainty relation det Sigma = 1.
    """
    beta = complex(beta)
    if not (beta.real > 0.0):
        raise ValueError(f"Re(beta) must be positive, got {beta!r}")
    sigma_qq = 0.5 / beta.real
    sigma_pq = -beta.imag / beta.real
    sigma_pp = (1.0 + sigma_pq**2) / sigma_qq
    return sigma_pp, sigma_pq, sigma_qq


def sigma_to_beta(sigma_pq: float, sigma_qq: float) -> complex:
    """Inverse of beta_to_sigma on the det Sigma = 1 family."""
    if sigma_qq <= 0.0:
        raise ValueError("sigma_qq must be positive")
    re = 0.5 / sigma_qq
    return complex(re, -sigma_pq * re)


def trajectory_from_beta(beta: complex, q0: float, p0: float) -> GaussianTrajectory:
    sigma_pp, sigma_pq, sigma_qq = beta_to_sigma(beta)
    return GaussianTrajectory(float(q0), float(p0), sigma_pp, sigma_pq, sigma_qq, 0.0)


def rhs_full(params: ModelParams, state: GaussianTrajectory):
    """Time derivatives (dq, dp, dsigma_pp, dsigma_pq, dsigma_qq, dlog_norm_sq).

    Component form of the coupled center/covariance/norm system for the
    single-band lattice; valid for arbitrary complex couplings and for
    degenerate (point) covariances.
    """
    rgp = params.g_plus.real
    igp = params.g_plus.imag
    rgm = params.g_minus.real
    igm = params.g_minus.imag
    sin_p = math.sin(state.p)
    cos_p = math.cos(state.p)
    # A = dH_I/dp, a = d2H_R/dp2, B = d2H_I/dp2 = -2 * H_I at this p.
    A = igp * sin_p - rgm * cos_p
    a = -rgp * cos_p + igm * sin_p
    B = igp * cos_p + rgm * sin_p
    spp = state.sigma_pp
    spq = state.sigma_pq
    return (
        -rgp * sin_p - igm * cos_p - A * spq,
        -2.0 * params.force - A * spp,
        -B * spp * spp,
        (a - B * spq) * spp,
        2.0 * a * spq + B * (1.0 - spq * spq),
        B * (2.0 - 0.5 * spp),
    )


def rhs_from_split(split: HamiltonianSplit, state: GaussianTrajectory):
    """Matrix form of the same derivatives, via the Hamiltonian split.

    dz = Omega grad H_R - Sigma grad H_I
    dSigma = Omega H_R'' Sigma - Sigma H_R'' Omega - Omega H_I'' Omega
             - Sigma H_I'' Sigma
    dlogP = -2 H_I + (1/2) Tr(Omega H_I'' Omega Sigma^{-1})

    The norm equation needs the inverse covariance, so this form requires
    det Sigma > 0; it exists as an independent cross-check of rhs_full and
    is not used by the integrator.
    """
    sigma = state.sigma_matrix()
    det = state.sigma_pp * state.sigma_qq - state.sigma_pq**2
    if det <= 0.0:
        raise ValueError(f"matrix form needs det Sigma > 0, got {det:g}")
    p, q = state.p, state.q
    dz = _OMEGA @ split.grad_real(p, q) - sigma @ split.grad_imag(p)
    hr2 = split.hess_real(p)
    hi2 = split.hess_imag(p)
    d_sigma = (
        _OMEGA @ hr2 @ sigma
        - sigma @ hr2 @ _OMEGA
        - _OMEGA @ hi2 @ _OMEGA
        - sigma @ hi2 @ sigma
    )
    sigma_inv = np.linalg.inv(sigma)
    dlog = -2.0 * split.h_imag(p) + 0.5 * np.trace(_OMEGA @ hi2 @ _OMEGA @ sigma_inv)
    return (
        float(dz[1]),
        float(dz[0]),
        float(d_sigma[0, 0]),
        float(d_sigma[0, 1]),
        float(d_sigma[1, 1]),
        float(dlog),
    )


def det_sigma_drift(state: GaussianTrajectory) -> float:
    """|det Sigma - 1|; the motion preserves det Sigma = 1 exactly."""
    return abs(state.sigma_pp * state.sigma_qq - state.sigma_pq**2 - 1.0)


def integrate_classical(
    params: ModelParams,
    initial: GaussianTrajectory,
    t_grid,
    dt: float = 1e-3,
):
    """Fixed-step 4th-order integration of rhs_full over an ascending grid.

    Returns one GaussianTrajectory per grid time; output times are hit
    exactly by splitting each interval into equal substeps.  Divergence of
    sigma_pp past SIGMA_PP_LIMIT raises CovarianceBlowupError carrying the
    time at which it happened.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("t_grid must be a non-empty 1-D array")
    if t_grid[0] < 0.0 or np.any(np.diff(t_grid) < 0.0) or not np.all(np.isfinite(t_grid)):
        raise ValueError("t_grid must be finite, ascending and start at t >= 0")
    dt = float(dt)
    if dt <= 0.0:
        raise ValueError("dt must be positive")

    rgp = params.g_plus.real
    igp = params.g_plus.imag
    rgm = params.g_minus.real
    igm = params.g_minus.imag
    force_2 = 2.0 * params.force

    def rhs(y, t_at):
        q_, p_, spp, spq, sqq, lp = y
        # Check before evaluating: once sigma_pp escapes, a single RK stage can
        # overflow and feed non-finite momenta to the trig calls below.
        if not (spp < SIGMA_PP_LIMIT):
            raise CovarianceBlowupError(
                f"sigma_pp exceeded {SIGMA_PP_LIMIT:.0e} at t = {t_at:.6g}"
            )
        sin_p = math.sin(p_)
        cos_p = math.cos(p_)
        A = igp * sin_p - rgm * cos_p
        a = -rgp * cos_p + igm * sin_p
        B = igp * cos_p + rgm * sin_p
        return (
            -rgp * sin_p - igm * cos_p - A * spq,
            -force_2 - A * spp,
            -B * spp * spp,
            (a - B * spq) * spp,
            2.0 * a * spq + B * (1.0 - spq * spq),
            B * (2.0 - 0.5 * spp),
        )

    y = (initial.q, initial.p, initial.sigma_pp, initial.sigma_pq, initial.sigma_qq,
         initial.log_norm_sq)
    out = []
    t_now = 0.0
    for t_target in t_grid:
        span = t_target - t_now
        if span > 0.0:
            steps = max(1, math.ceil(span / dt))
            h = span / steps
            h2 = 0.5 * h
            h6 = h / 6.0
            for j in range(steps):
                t_sub = t_now + j * h
                k1 = rhs(y, t_sub)
                k2 = rhs(tuple(y[i] + h2 * k1[i] for i in range(6)), t_sub + h2)
                k3 = rhs(tuple(y[i] + h2 * k2[i] for i in range(6)), t_sub + h2)
                k4 = rhs(tuple(y[i] + h * k3[i] for i in range(6)), t_sub + h)
                y = tuple(
                    y[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                    for i in range(6)
                )
                if not (y[2] < SIGMA_PP_LIMIT):
                    t_blow = t_now + (j + 1) * h
                    raise CovarianceBlowupError(
                        f"sigma_pp exceeded {SIGMA_PP_LIMIT:.0e} at t = {t_blow:.6g}"
                    )
            t_now = float(t_target)
        out.append(GaussianTrajectory(*y))
    return out


def _trig_deltas(params: ModelParams, p0, t):
    force = params.force
    if force == 0.0:
        raise ValueError("closed-form laws require force != 0")
    p0 = np.asarray(p0, dtype=float)
    p = p0 - 2.0 * force * np.asarray(t, dtype=float)
    d_sin = np.sin(p) - np.sin(p0)
    d_cos = np.cos(p) - np.cos(p0)
    return p, d_sin, d_cos


def narrow_limit_closed_form(
    params: ModelParams,
    q0,
    p0,
    sigma_pq: float,
    t,
    log_norm_sq0: float = 0.0,
):
    """Zero-momentum-variance limit: closed (p, q, log_norm_sq) at times t.

    With sigma_pp = 0 the momentum drifts freely, p = p0 - 2 F t, and the
    remaining equations integrate to elementary trig antiderivatives.
    sigma_pq enters the center motion but stays constant itself.  q0, p0
    and t may be arrays; shapes follow numpy broadcasting, which is how
    the ensemble module evolves all its members at once.
    """
    p, d_sin, d_cos = _trig_deltas(params, p0, t)
    rgp = params.g_plus.real
    igp = params.g_plus.imag
    rgm = params.g_minus.real
    igm = params.g_minus.imag
    inv_2f = 0.5 / params.force
    q = (
        np.asarray(q0, dtype=float)
        - (rgp + igp * sigma_pq) * inv_2f * d_cos
        + (igm - rgm * sigma_pq) * inv_2f * d_sin
    )
    log_norm = log_norm_sq0 - (igp / params.force) * d_sin + (rgm / params.force) * d_cos
    return p, q, log_norm


def narrow_limit_sigma_qq(
    params: ModelParams,
    p0: float,
    sigma_pq: float,
    sigma_qq0: float,
    t,
):
    """Position variance along the zero-momentum-variance motion."""
    _, d_sin, d_cos = _trig_deltas(params, p0, t)
    rgp = params.g_plus.real
    igp = params.g_plus.imag
    rgm = params.g_minus.real
    igm = params.g_minus.imag
    inv_2f = 0.5 / params.force
    int_a = (rgp * d_sin + igm * d_cos) * inv_2f
    int_b = -(igp * d_sin - rgm * d_cos) * inv_2f
    return sigma_qq0 + 2.0 * sigma_pq * int_a + (1.0 - sigma_pq**2) * int_b


def perturbative_p(params: ModelParams, p0: float, sigma_pp0: float, t):
    """First-order-in-variance momentum approximant for the preset patterns.

    Returns (p, sigma_pp) arrays.  The variance solves its own equation
    exactly along the free drift, and its accumulated back-action shifts
    the momentum.  The variance denominator reaching zero means the
    finite-time divergence has been hit; that raises
    PerturbativeBreakdownError naming the first bad time rather than
    returning a pole.
    """
    preset = identify_preset(params)
    if preset is None:
        raise ValueError("perturbative approximant exists only for the preset patterns")
    force = params.force
    if force == 0.0:
        raise ValueError("perturbative approximant requires force != 0")
    t = np.asarray(t, dtype=float)
    p0 = float(p0)
    s0 = float(sigma_pp0)
    if s0 < 0.0:
        raise ValueError("sigma_pp0 must be non-negative")
    drift = p0 - 2.0 * force * t
    if preset[0] == "hatano_nelson":
        _, g, mu = preset
        coupling = g * math.sinh(mu) / force
        denom = 1.0 + coupling * (np.cos(drift) - math.cos(p0)) * s0
        _check_denominator(denom, t)
        sigma_pp = s0 / denom
        p = drift - coupling * (sigma_pp * np.sin(drift) - s0 * math.sin(p0))
    else:
        _, g = preset
        coupling = g / force
        denom = 1.0 - coupling * (np.sin(drift) - math.sin(p0)) * s0
        _check_denominator(denom, t)
        sigma_pp = s0 / denom
        p = drift - coupling * sigma_pp * (np.cos(drift) - math.cos(p0))
    return p, sigma_pp


def _check_denominator(denom, t):
    bad = np.asarray(denom) <= 0.0
    if np.any(bad):
        t_bad = float(np.atleast_1d(np.asarray(t))[np.argmax(np.atleast_1d(bad))])
        raise PerturbativeBreakdownError(
            f"variance denominator crossed zero by t = {t_bad:.6g}; "
            "the initial momentum variance is too large for this approximant"
        )
