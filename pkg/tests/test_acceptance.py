"""Release acceptance suite: twelve numbered end-to-end checks.

Every test measures first and registers its verdict on the shared result
board (conftest) before asserting, so the terminal summary prints one
line per criterion even when an assert aborts the test body.

Two criteria fail for documented numerical reasons and are left failing
rather than tuned until green:

* criterion 2, uniform-gain preset: during the decaying half-period the
  physical amplitudes shrink by e^{-2g/F} while roundoff injected at the
  quasimomentum band edge grows by the reciprocal factor, so the direct
  integrator's per-amplitude error saturates near 1 at any step size and
  the quasimomentum-grid propagator refuses two output times through its
  spill guard.  The asymmetric-preset legs pass with orders to spare.
* criterion 9, uniform-gain preset at beta = 0.05, g = 0.1: the
  first-order momentum approximant misses its 1e-3 radian budget by
  roughly 2.7x.  The gap peaks just past mid-period and closes again at
  the revival, so it is the second-order remainder in the starting
  momentum variance (0.1 here), not an accumulating drift.

Bounds are frozen constants; nothing here adapts to the measured values
at runtime.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from blochnh import (
    GaussianTrajectory,
    ModelParams,
    TruncationLeakError,
    bessel_i,
    bessel_i_log,
    beta_to_sigma,
    ensemble_averages,
    ensemble_from_site,
    evolve_ensemble,
    gaussian_state,
    integrate_classical,
    narrow_limit_closed_form,
    observables,
    perturbative_p,
    propagate_closed_form,
    propagate_direct,
    propagate_wei_norman,
    relative_amplitude_deviation,
    site_state,
    spectrum_truncated,
    trajectory_from_beta,
)
from blochnh.bessel import bessel_i_scaled_range, bessel_j_range
from blochnh.classical import det_sigma_drift

from conftest import record_criterion

F = 0.1
T_B = math.pi / F

# Quarter-site sampling over both periods.  Starts at 0.25 and stops short
# of 2 T_B, so it never lands on a revival time where sin(F t) = 0 and the
# single-site laws degenerate (flat momentum distribution, I_1/I_0 at 0).
SAMPLE_GRID = np.arange(0.25, 2.0 * T_B, 0.25)


def _renormalised_density(state):
    prob = np.abs(state.amplitudes) ** 2
    return prob / prob.sum()


def _wrapped_gap(angle: float, target: float) -> float:
    """Distance between two angles on the circle."""
    d = angle - target
    return abs(math.atan2(math.sin(d), math.cos(d)))


# --- criterion 1 -----------------------------------------------------------


def test_criterion_01_equidistant_real_ladder(hn_params, ic_params):
    interior = {}
    spacing_dev = {}
    imag_worst = 0.0
    for name, params in (("asym", hn_params), ("gain", ic_params)):
        spectrum = spectrum_truncated(params, (-50, 50))
        middle = spectrum[25:76]
        imag_worst = max(imag_worst, float(np.max(np.abs(middle.imag))))
        spacing_dev[name] = float(np.max(np.abs(np.diff(middle.real) - 2.0 * F)))
        interior[name] = middle.real
    preset_gap = float(np.max(np.abs(interior["asym"] - interior["gain"])))

    record_criterion(
        1,
        "interior ladder spectrum is real and equidistant for both presets",
        imag_worst < 1e-8 and max(spacing_dev.values()) < 1e-6 and preset_gap < 1e-6,
        f"imag {imag_worst:.1e}, spacing dev asym {spacing_dev['asym']:.1e} / "
        f"gain {spacing_dev['gain']:.1e}, preset gap {preset_gap:.1e}",
    )
    assert imag_worst < 1e-8
    assert spacing_dev["asym"] < 1e-6
    assert spacing_dev["gain"] < 1e-6
    assert preset_gap < 1e-6


# --- criterion 2 -----------------------------------------------------------

_EQUIV_TIMES = np.arange(0.0, 2.0 * T_B + 1e-9, T_B / 4.0)


def _engine_gaps(params, start):
    """Worst pairwise per-amplitude gaps of the three engines on one start.

    The quasimomentum-grid propagator may refuse an output time through
    its spill guard; those refusals are returned instead of being treated
    as agreement.
    """
    direct = propagate_direct(start, params, _EQUIV_TIMES, dt=1e-3)
    gaps = {"direct_vs_closed": 0.0, "direct_vs_grid": 0.0, "closed_vs_grid": 0.0}
    refusals = []
    for t, st_direct in zip(_EQUIV_TIMES, direct):
        st_closed = propagate_closed_form(start, params, float(t))
        gaps["direct_vs_closed"] = max(
            gaps["direct_vs_closed"],
            relative_amplitude_deviation(st_direct, st_closed),
        )
        try:
            st_grid = propagate_wei_norman(start, params, float(t))
        except TruncationLeakError as err:
            refusals.append((float(t), str(err)))
            continue
        gaps["direct_vs_grid"] = max(
            gaps["direct_vs_grid"],
            relative_amplitude_deviation(st_direct, st_grid),
        )
        gaps["closed_vs_grid"] = max(
            gaps["closed_vs_grid"],
            relative_amplitude_deviation(st_closed, st_grid),
        )
    return gaps, refusals


def test_criterion_02_engines_agree_per_amplitude(hn_params, ic_params):
    window = (-200, 200)
    gaps = {}
    refusals = {}
    for name, params in (("asym", hn_params), ("gain", ic_params)):
        for shape, start in (
            ("delta", site_state(window, 0)),
            ("gauss", gaussian_state(window, 0.02, 0.0, 0.0)),
        ):
            leg_gaps, leg_refusals = _engine_gaps(params, start)
            gaps[f"{name} {shape}"] = leg_gaps
            if leg_refusals:
                refusals[f"{name} {shape}"] = leg_refusals

    asym_worst = max(v for leg in ("asym delta", "asym gauss") for v in gaps[leg].values())
    gain_worst = max(v for leg in ("gain delta", "gain gauss") for v in gaps[leg].values())
    analytic_pair = max(leg["closed_vs_grid"] for leg in gaps.values())

    # Step-size diagnostic for the failing preset: if the direct answer moved
    # under dt halving by as much as it differs from the closed form, the gap
    # is a roundoff floor, not unconverged truncation error.
    end_states = [
        propagate_direct(site_state(window, 0), ic_params, [2.0 * T_B], dt=dt)[-1]
        for dt in (1e-3, 5e-4)
    ]
    halving_shift = relative_amplitude_deviation(*end_states)

    problems = []
    if asym_worst > 1e-8:
        problems.append(f"asymmetric-preset engines disagree at {asym_worst:.2e}")
    if gain_worst > 1e-8:
        problems.append(
            f"gain-preset direct integration is off by {gain_worst:.2e} "
            f"(the two analytic engines still agree to {analytic_pair:.2e}); the "
            "decaying half-period amplifies band-edge roundoff by e^(2g/F) ~ e^20 "
            f"relative to the packet, and halving dt shifts the direct answer by "
            f"{halving_shift:.2e}, so the gap does not converge away"
        )
    for leg, leg_refusals in refusals.items():
        times = ", ".join(f"{t:.4g}" for t, _ in leg_refusals)
        problems.append(
            f"{leg}: quasimomentum-grid propagator refused t = {times} "
            f"({leg_refusals[0][1]})"
        )

    record_criterion(
        2,
        "direct, closed-form and quasimomentum-grid engines agree per amplitude",
        not problems,
        f"asym {asym_worst:.1e}; gain direct {gain_worst:.1e}, analytic pair "
        f"{analytic_pair:.1e}, {sum(len(r) for r in refusals.values())} grid "
        f"refusals, dt-halving shift {halving_shift:.0e}",
    )
    assert not problems, "; ".join(problems)


# --- criterion 3 -----------------------------------------------------------


def test_criterion_03_one_period_revival(hn_params, ic_params):
    window = (-200, 200)
    closed_worst = 0.0
    for params in (hn_params, ic_params):
        for start in (site_state(window, 0), gaussian_state(window, 0.02, 0.0, 0.0)):
            revived = propagate_closed_form(start, params, T_B)
            closed_worst = max(
                closed_worst,
                float(np.max(np.abs(_renormalised_density(revived) - _renormalised_density(start)))),
            )
    start = site_state(window, 0)
    revived = propagate_direct(start, hn_params, [T_B], dt=1e-3)[-1]
    direct_dev = float(
        np.max(np.abs(_renormalised_density(revived) - _renormalised_density(start)))
    )

    record_criterion(
        3,
        "renormalised density revives after one period",
        closed_worst < 1e-6 and direct_dev < 1e-6,
        f"closed form {closed_worst:.1e}, direct cross-check {direct_dev:.1e}",
    )
    assert closed_worst < 1e-6
    assert direct_dev < 1e-6


# --- criteria 4 and 5 ------------------------------------------------------


@pytest.fixture(scope="module")
def asym_site_history():
    """Quantum observables of the asymmetric-preset single-site run.

    Criterion 4 checks these against the closed-form laws; criterion 5
    checks the weighted ensemble against exactly the same numbers.
    """
    params = ModelParams.hatano_nelson(1.0, 0.2, F)
    start = site_state((-120, 120), 0)
    return tuple(
        observables(propagate_closed_form(start, params, float(t))) for t in SAMPLE_GRID
    )


def _site_start_laws(t: float):
    """Norm log, center and momentum closed forms for the asymmetric preset.

    The Bessel argument flips sign on the second period; the even/odd
    symmetries I_0(-x) = I_0(x) and I_1(-x) = -I_1(x) carry the sign, and
    the circular momentum mean picks up a half turn because the momentum
    distribution passes through uniform at the period boundary before
    reweighting around the opposite direction.
    """
    xi = (4.0 * math.sinh(0.2) / F) * math.sin(F * t)
    log_norm = bessel_i_log(0, abs(xi))
    ratio = math.copysign(math.exp(bessel_i_log(1, abs(xi)) - log_norm), xi)
    center = -(2.0 * math.cosh(0.2) / F) * math.sin(F * t) * ratio
    momentum = 0.5 * math.pi - F * t + (math.pi if t > T_B else 0.0)
    return log_norm, center, momentum


def test_criterion_04_site_start_closed_forms(asym_site_history):
    worst_norm = worst_center = worst_momentum = 0.0
    for t, seen in zip(SAMPLE_GRID, asym_site_history):
        log_norm, center, momentum = _site_start_laws(float(t))
        worst_norm = max(worst_norm, abs(seen.log_norm_sq - log_norm))
        worst_center = max(worst_center, abs(seen.n_mean - center) / abs(center))
        worst_momentum = max(worst_momentum, _wrapped_gap(seen.p_circular, momentum))

    record_criterion(
        4,
        "single-site start matches the Bessel norm/center laws and momentum drift",
        worst_norm < 1e-6 and worst_center < 1e-6 and worst_momentum < 1e-6,
        f"log-norm {worst_norm:.1e}, center {worst_center:.1e}, momentum "
        f"{worst_momentum:.1e} (half-turn offset on the second period)",
    )
    assert worst_norm < 1e-6
    assert worst_center < 1e-6
    assert worst_momentum < 1e-6


def test_criterion_05_ensemble_reproduces_quantum(hn_params, asym_site_history):
    ensemble = ensemble_from_site(1024)
    vs_formula = {"log_norm": 0.0, "center": 0.0, "momentum": 0.0}
    vs_quantum = {"log_norm": 0.0, "center": 0.0, "momentum": 0.0}
    for t, seen in zip(SAMPLE_GRID, asym_site_history):
        avg = ensemble_averages(evolve_ensemble(hn_params, ensemble, float(t)))
        log_norm, center, momentum = _site_start_laws(float(t))
        vs_formula["log_norm"] = max(vs_formula["log_norm"], abs(avg.log_norm_total - log_norm))
        vs_formula["center"] = max(vs_formula["center"], abs(avg.q_mean - center))
        vs_formula["momentum"] = max(
            vs_formula["momentum"], _wrapped_gap(avg.p_circular, momentum)
        )
        vs_quantum["log_norm"] = max(
            vs_quantum["log_norm"], abs(avg.log_norm_total - seen.log_norm_sq)
        )
        vs_quantum["center"] = max(vs_quantum["center"], abs(avg.q_mean - seen.n_mean))
        vs_quantum["momentum"] = max(
            vs_quantum["momentum"], _wrapped_gap(avg.p_circular, seen.p_circular)
        )

    formula_worst = max(vs_formula.values())
    quantum_worst = max(vs_quantum.values())
    record_criterion(
        5,
        "1024-member ensemble reproduces the closed forms and the quantum engine",
        formula_worst < 1e-10 and quantum_worst < 1e-6,
        f"vs formulas {formula_worst:.1e}, vs quantum {quantum_worst:.1e}",
    )
    assert formula_worst < 1e-10
    assert quantum_worst < 1e-6


# --- criterion 6 -----------------------------------------------------------


def test_criterion_06_gain_preset_mirror_symmetry(ic_params):
    start = site_state((-150, 150), 0)
    worst_center = worst_mirror = worst_norm_law = 0.0
    min_log_norm = math.inf
    for t in SAMPLE_GRID:
        state = propagate_closed_form(start, ic_params, float(t))
        seen = observables(state)
        worst_center = max(worst_center, abs(seen.n_mean))
        amp = state.amplitudes
        worst_mirror = max(
            worst_mirror,
            float(np.max(np.abs(amp[::-1] - np.conj(amp))) / np.max(np.abs(amp))),
        )
        xi = (4.0 / F) * math.sin(F * t)
        worst_norm_law = max(
            worst_norm_law,
            abs(math.expm1(seen.log_norm_sq - bessel_i_log(0, abs(xi)))),
        )
        min_log_norm = min(min_log_norm, seen.log_norm_sq)

    record_criterion(
        6,
        "gain preset keeps its mirror symmetry, norm law and norm floor",
        worst_center < 1e-10
        and worst_mirror < 1e-8
        and worst_norm_law < 1e-6
        and min_log_norm >= -1e-10,
        f"center {worst_center:.1e}, mirror {worst_mirror:.1e}, norm law "
        f"{worst_norm_law:.1e}, min log-norm {min_log_norm:.2e}",
    )
    assert worst_center < 1e-10
    assert worst_mirror < 1e-8
    assert worst_norm_law < 1e-6
    assert min_log_norm >= -1e-10


# --- criterion 7 -----------------------------------------------------------


def test_criterion_07_det_sigma_conserved(rng):
    grid = np.linspace(0.0, 2.0 * T_B, 64)
    worst = 0.0
    for _ in range(20):
        magnitude = rng.uniform(0.3, 1.2)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        g1 = magnitude * cmath.exp(1j * angle)
        g2 = g1.conjugate() + complex(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05))
        params = ModelParams(g1=g1, g2=g2, force=F)
        beta = complex(rng.uniform(0.02, 0.2), rng.uniform(-0.05, 0.05))
        sigma_pp = 2.0 * beta.real
        sigma_pq = -beta.imag / beta.real
        sigma_qq = (1.0 + sigma_pq**2) / sigma_pp
        start = GaussianTrajectory(
            rng.uniform(-2.0, 2.0),
            rng.uniform(0.0, 2.0 * math.pi),
            sigma_pp,
            sigma_pq,
            sigma_qq,
            0.0,
        )
        for state in integrate_classical(params, start, grid, dt=2e-3):
            worst = max(worst, det_sigma_drift(state))

    record_criterion(
        7,
        "covariance determinant stays at one over 20 random draws",
        worst < 1e-8,
        f"worst |det - 1| = {worst:.1e}",
    )
    assert worst < 1e-8


# --- criterion 8 -----------------------------------------------------------


def test_criterion_08_broad_packet_tracks_quantum(hn_params):
    grid = np.arange(0.0, T_B + 1e-9, 0.25)
    start = gaussian_state((-200, 200), 0.02, 0.0, 0.0)
    center_qm = np.empty(grid.size)
    log_norm_qm = np.empty(grid.size)
    for i, t in enumerate(grid):
        seen = observables(propagate_closed_form(start, hn_params, float(t)))
        center_qm[i] = seen.n_mean
        log_norm_qm[i] = seen.log_norm_sq
    states = integrate_classical(
        hn_params, trajectory_from_beta(0.02, 0.0, 0.0), grid, dt=1e-3
    )
    center_dev = float(np.max(np.abs(np.array([s.q for s in states]) - center_qm)))
    log_norm_dev = float(
        np.max(np.abs(np.array([s.log_norm_sq for s in states]) - log_norm_qm))
    )

    record_criterion(
        8,
        "broad packet: classical center and norm track the quantum run",
        center_dev < 0.5 and log_norm_dev < 0.02,
        f"center {center_dev:.3f} sites (< 0.5), log-norm {log_norm_dev:.5f} (< 0.02)",
    )
    assert center_dev < 0.5
    assert log_norm_dev < 0.02


# --- criterion 9 -----------------------------------------------------------


def _approximant_gap(params, beta, grid):
    exact = integrate_classical(params, trajectory_from_beta(beta, 0.0, 0.0), grid, dt=1e-3)
    p_exact = np.array([s.p for s in exact])
    p_approx, _ = perturbative_p(params, 0.0, beta_to_sigma(beta)[0], grid)
    return np.abs(np.asarray(p_approx) - p_exact)


def test_criterion_09_momentum_approximant(hn_params):
    grid = np.arange(0.0, 2.0 * T_B + 1e-9, 0.25)
    gentle = float(_approximant_gap(hn_params, 0.02, grid).max())
    steep = float(_approximant_gap(ModelParams.hatano_nelson(1.0, 0.8, F), 0.02, grid).max())
    ratio = steep / gentle
    gain_gaps = _approximant_gap(ModelParams.imaginary_coupling(0.1, F), 0.05, grid)
    gain = float(gain_gaps.max())
    gain_one_period = float(gain_gaps[grid <= T_B].max())

    record_criterion(
        9,
        "first-order momentum approximant stays inside 1e-3 radians",
        gentle < 1e-3 and ratio > 3.0 and gain < 1e-3,
        f"mu 0.2: {gentle:.3e}; mu 0.8: {steep:.3e} (x{ratio:.0f}); gain preset "
        f"{gain:.3e} over two periods ({gain_one_period:.3e} over one)",
    )
    assert gentle < 1e-3
    assert ratio > 3.0
    assert gain < 1e-3, (
        f"gain-preset approximant reaches {gain:.3e} rad against a 1e-3 budget; "
        "the gap peaks just past mid-period and closes at the revival, so it is "
        "the second-order remainder in the starting momentum variance (0.1 here), "
        "out of reach of a first-order formula at this width"
    )


# --- criterion 10 ----------------------------------------------------------


def test_criterion_10_narrow_limit_consistency(hn_params, ic_params):
    grid = np.arange(0.0, T_B + 1e-9, 0.25)
    start = GaussianTrajectory(0.0, 0.3, 1e-8, 0.0, 1e8, 0.0)
    per_preset = {}
    for name, params in (("asym", hn_params), ("gain", ic_params)):
        states = integrate_classical(params, start, grid, dt=1e-3)
        p_ref, q_ref, log_ref = narrow_limit_closed_form(params, 0.0, 0.3, 0.0, grid)
        per_preset[name] = max(
            float(np.max(np.abs(np.array([s.q for s in states]) - q_ref))),
            float(np.max(np.abs(np.array([s.p for s in states]) - p_ref))),
            float(np.max(np.abs(np.array([s.log_norm_sq for s in states]) - log_ref))),
        )
    worst = max(per_preset.values())

    record_criterion(
        10,
        "stiff narrow packet follows the zero-variance closed forms",
        worst < 1e-5,
        f"asym {per_preset['asym']:.1e}, gain {per_preset['gain']:.1e}",
    )
    assert worst < 1e-5


# --- criterion 11 ----------------------------------------------------------


def test_criterion_11_bessel_sum_rules():
    worst_j = worst_i = worst_quad = 0.0
    kappa = 2.0 * math.pi * np.arange(1024) / 1024.0
    for x in (0.5, 2.0, 10.0, 20.0):
        j = bessel_j_range(-60, 60, x)
        worst_j = max(worst_j, abs(float(np.sum(j * j)) - 1.0))
        worst_i = max(worst_i, abs(float(np.sum(bessel_i_scaled_range(-60, 60, x))) - 1.0))
        quadrature = float(np.mean(np.exp(x * np.cos(kappa))))
        worst_quad = max(worst_quad, abs(quadrature / bessel_i(0, x) - 1.0))

    record_criterion(
        11,
        "Bessel sum rules and the quadrature identity hold to 1e-12",
        worst_j < 1e-12 and worst_i < 1e-12 and worst_quad < 1e-12,
        f"J^2 sum {worst_j:.1e}, scaled-I sum {worst_i:.1e}, quadrature {worst_quad:.1e}",
    )
    assert worst_j < 1e-12
    assert worst_i < 1e-12
    assert worst_quad < 1e-12


# --- criterion 12 ----------------------------------------------------------


def test_criterion_12_hermitian_regression(hermitian_params):
    window = (-60, 60)

    # Single-site start: conserved norm, pinned center, breathing width.
    start = site_state(window, 0)
    worst_norm = worst_center = worst_width = 0.0
    for t in SAMPLE_GRID:
        seen = observables(propagate_closed_form(start, hermitian_params, float(t)))
        width = 2.0 * (math.sin(F * t) / F) ** 2
        worst_norm = max(worst_norm, abs(seen.norm_sq - 1.0))
        worst_center = max(worst_center, abs(seen.n_mean))
        worst_width = max(worst_width, abs(seen.n_var - width))

    # Gaussian starts: the hop correlator rotates rigidly at rate 2F and its
    # integral drives the center, with no amplitude change.
    worst_rotation = worst_drive = 0.0
    for p0 in (0.0, 1.1):
        packet = gaussian_state(window, 0.3, 0.0, p0)
        ref = observables(packet)
        for t in SAMPLE_GRID:
            seen = observables(propagate_closed_form(packet, hermitian_params, float(t)))
            turned = ref.k_mean * cmath.exp(-2j * F * t)
            worst_rotation = max(worst_rotation, abs(seen.k_mean - turned))
            driven = ref.n_mean + (ref.k_mean * (1.0 - cmath.exp(-2j * F * t))).real / F
            worst_drive = max(worst_drive, abs(seen.n_mean - driven))

    record_criterion(
        12,
        "hermitian limit keeps unit norm and the breathing/drive closed forms",
        worst_norm < 1e-10
        and worst_center < 1e-10
        and worst_width < 1e-8
        and worst_rotation < 1e-12
        and worst_drive < 1e-10,
        f"norm {worst_norm:.1e}, center {worst_center:.1e}, width {worst_width:.1e}, "
        f"correlator {worst_rotation:.1e}, drive {worst_drive:.1e}",
    )
    assert worst_norm < 1e-10
    assert worst_center < 1e-10
    assert worst_width < 1e-8
    assert worst_rotation < 1e-12
    assert worst_drive < 1e-10
