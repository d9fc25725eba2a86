"""Scenario execution: method dispatch, CSV output, comparison report.

Methods run concurrently (they share only the immutable scenario), results
land in per-method column dictionaries keyed by the fixed CSV schema, and
every file write happens after all computation so an engine failure never
leaves partial output behind.

Column conventions that make methods comparable in one table:

* p_circular carries the unwrapped continuation of the circular momentum
  mean for wavefunction and ensemble methods, and the integrated
  (naturally continuous) momentum for the classical ones.  The principal
  branch is recoverable mod 2 pi.
* n_var from the classical reductions is sigma_qq / 2: the covariance
  normalization det Sigma = 1 makes Sigma twice the probability
  covariance, and the factor restores the site-distribution variance the
  wavefunction methods report.
* Columns a method does not define are empty in the CSV and NaN here.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classical import (
    beta_to_sigma,
    integrate_classical,
    narrow_limit_closed_form,
    narrow_limit_sigma_qq,
    perturbative_p,
    trajectory_from_beta,
)
from .ensemble import ensemble_averages, ensemble_from_gaussian, ensemble_from_site, evolve_ensemble
from .quantum import (
    gaussian_state,
    observables,
    propagate_closed_form,
    propagate_direct,
    propagate_wei_norman,
    site_state,
    unwrap_angles,
)
from .scenario import METHOD_COLUMNS, OBSERVABLES, Scenario, ToleranceSpec, WAVEFUNCTION_METHODS

__all__ = [
    "MethodSeries",
    "ComparisonLine",
    "ToleranceResult",
    "RunResult",
    "run_scenario",
    "report_text",
    "write_outputs",
    "worker_count",
]

CSV_HEADER = "t,P,logP,n_mean,p_circular,n_var,sigma_pp,sigma_pq,sigma_qq"

# Guard for relative deviations when both series are essentially zero.
_REL_FLOOR = 1e-300


@dataclass(frozen=True)
class MethodSeries:
    """One method's observable columns (and density, if it has amplitudes)."""

    method: str
    columns: dict
    density: np.ndarray | None


@dataclass(frozen=True)
class ComparisonLine:
    observable: str
    method_a: str
    method_b: str
    max_abs: float
    max_rel: float
    samples: int


@dataclass(frozen=True)
class ToleranceResult:
    spec: ToleranceSpec
    measured: float
    passed: bool


@dataclass(frozen=True)
class RunResult:
    scenario: Scenario
    t: np.ndarray
    series: dict
    comparisons: tuple
    tolerance_results: tuple

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.tolerance_results)


def worker_count(task_count: int) -> int:
    """Worker cap from BLOCHNH_THREADS; 0 or unset means automatic."""
    raw = os.environ.get("BLOCHNH_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"BLOCHNH_THREADS must be an integer, got {raw!r}") from None
    if cap < 0:
        raise ValueError("BLOCHNH_THREADS must be >= 0")
    auto = min(task_count, os.cpu_count() or 1)
    if cap == 0:
        return max(1, auto)
    return max(1, min(cap, task_count))


def _initial_state(scenario: Scenario):
    if scenario.initial_kind == "gaussian":
        return gaussian_state(scenario.window, scenario.beta, scenario.q0, scenario.p0)
    return site_state(scenario.window, scenario.site)


def _nan_columns(t: np.ndarray) -> dict:
    return {name: np.full(t.size, math.nan) for name in OBSERVABLES}


def _quantum_series(method: str, scenario: Scenario, t: np.ndarray) -> MethodSeries:
    state0 = _initial_state(scenario)
    if method == "direct":
        states = propagate_direct(state0, scenario.params, t, dt=scenario.dt)
    elif method == "closed_form":
        states = [propagate_closed_form(state0, scenario.params, tj) for tj in t]
    else:
        states = [
            propagate_wei_norman(state0, scenario.params, tj, scenario.kappa_points)
            for tj in t
        ]
    cols = _nan_columns(t)
    p_raw = np.empty(t.size)
    density = np.empty((t.size, state0.amplitudes.size))
    for j, state in enumerate(states):
        ob = observables(state)
        cols["P"][j] = ob.norm_sq
        cols["logP"][j] = ob.log_norm_sq
        cols["n_mean"][j] = ob.n_mean
        cols["n_var"][j] = ob.n_var
        p_raw[j] = ob.p_circular
        w = np.abs(state.amplitudes) ** 2
        density[j] = w / np.sum(w)
    cols["p_circular"] = unwrap_angles(p_raw)
    return MethodSeries(method, cols, density)


def _classical_series(scenario: Scenario, t: np.ndarray) -> MethodSeries:
    traj0 = trajectory_from_beta(scenario.beta, scenario.q0, scenario.p0)
    path = integrate_classical(scenario.params, traj0, t, dt=scenario.dt)
    cols = _nan_columns(t)
    for j, s in enumerate(path):
        cols["logP"][j] = s.log_norm_sq
        cols["n_mean"][j] = s.q
        cols["p_circular"][j] = s.p
        cols["sigma_pp"][j] = s.sigma_pp
        cols["sigma_pq"][j] = s.sigma_pq
        cols["sigma_qq"][j] = s.sigma_qq
    with np.errstate(over="ignore"):
        cols["P"] = np.exp(cols["logP"])
    cols["n_var"] = 0.5 * cols["sigma_qq"]
    return MethodSeries("classical", cols, None)


def _narrow_series(scenario: Scenario, t: np.ndarray) -> MethodSeries:
    _, sigma_pq, sigma_qq0 = beta_to_sigma(scenario.beta)
    p, q, log_norm = narrow_limit_closed_form(
        scenario.params, scenario.q0, scenario.p0, sigma_pq, t
    )
    sigma_qq = narrow_limit_sigma_qq(scenario.params, scenario.p0, sigma_pq, sigma_qq0, t)
    cols = _nan_columns(t)
    cols["logP"] = np.asarray(log_norm, dtype=float)
    with np.errstate(over="ignore"):
        cols["P"] = np.exp(cols["logP"])
    cols["n_mean"] = np.asarray(q, dtype=float)
    cols["p_circular"] = np.asarray(p, dtype=float)
    cols["sigma_pp"] = np.zeros(t.size)
    cols["sigma_pq"] = np.full(t.size, sigma_pq)
    cols["sigma_qq"] = np.asarray(sigma_qq, dtype=float)
    cols["n_var"] = 0.5 * cols["sigma_qq"]
    return MethodSeries("narrow", cols, None)


def _ensemble_series(scenario: Scenario, t: np.ndarray) -> MethodSeries:
    if scenario.initial_kind == "gaussian":
        ens = ensemble_from_gaussian(_initial_state(scenario), scenario.ensemble_size)
    else:
        ens = ensemble_from_site(scenario.ensemble_size, scenario.site)
    cols = _nan_columns(t)
    p_raw = np.empty(t.size)
    for j, tj in enumerate(t):
        av = ensemble_averages(evolve_ensemble(scenario.params, ens, tj))
        cols["P"][j] = av.norm_total
        cols["logP"][j] = av.log_norm_total
        cols["n_mean"][j] = av.q_mean
        cols["n_var"][j] = av.q_var
        p_raw[j] = av.p_circular
    cols["p_circular"] = unwrap_angles(p_raw)
    return MethodSeries("ensemble", cols, None)


def _perturbative_series(scenario: Scenario, t: np.ndarray) -> MethodSeries:
    sigma_pp0, _, _ = beta_to_sigma(scenario.beta)
    p, sigma_pp = perturbative_p(scenario.params, scenario.p0, sigma_pp0, t)
    cols = _nan_columns(t)
    cols["p_circular"] = np.asarray(p, dtype=float)
    cols["sigma_pp"] = np.asarray(sigma_pp, dtype=float)
    return MethodSeries("perturbative", cols, None)


def _run_method(method: str, scenario: Scenario, t: np.ndarray) -> MethodSeries:
    if method in WAVEFUNCTION_METHODS:
        return _quantum_series(method, scenario, t)
    if method == "classical":
        return _classical_series(scenario, t)
    if method == "narrow":
        return _narrow_series(scenario, t)
    if method == "ensemble":
        return _ensemble_series(scenario, t)
    return _perturbative_series(scenario, t)


def _deviations(series_a: MethodSeries, series_b: MethodSeries, observable: str):
    a = series_a.columns[observable]
    b = series_b.columns[observable]
    common = ~(np.isnan(a) | np.isnan(b))
    count = int(np.sum(common))
    if count == 0:
        return math.nan, math.nan, 0
    diff = np.abs(a[common] - b[common])
    max_abs = float(np.max(diff))
    scale = max(
        float(np.max(np.abs(a[common]))),
        float(np.max(np.abs(b[common]))),
        _REL_FLOOR,
    )
    return max_abs, max_abs / scale, count


def _compare_all(scenario: Scenario, series: dict):
    lines = []
    methods = scenario.methods
    for i, ma in enumerate(methods):
        for mb in methods[i + 1 :]:
            shared = METHOD_COLUMNS[ma] & METHOD_COLUMNS[mb]
            for obs in OBSERVABLES:
                if obs not in shared:
                    continue
                max_abs, max_rel, count = _deviations(series[ma], series[mb], obs)
                if count:
                    lines.append(ComparisonLine(obs, ma, mb, max_abs, max_rel, count))
    return tuple(lines)


def _evaluate_tolerances(scenario: Scenario, series: dict):
    results = []
    for spec in scenario.tolerances:
        max_abs, max_rel, count = _deviations(
            series[spec.method_a], series[spec.method_b], spec.observable
        )
        measured = max_rel if spec.relative else max_abs
        passed = count > 0 and measured <= spec.bound
        results.append(ToleranceResult(spec, measured, passed))
    return tuple(results)


def run_scenario(scenario: Scenario, out_dir=None) -> RunResult:
    """Execute every requested method; write output files when out_dir is set."""
    t = scenario.time_grid()
    methods = scenario.methods
    if len(methods) == 1:
        series_list = [_run_method(methods[0], scenario, t)]
    else:
        with ThreadPoolExecutor(max_workers=worker_count(len(methods))) as pool:
            series_list = list(pool.map(lambda m: _run_method(m, scenario, t), methods))
    series = {s.method: s for s in series_list}
    comparisons = _compare_all(scenario, series)
    tolerance_results = _evaluate_tolerances(scenario, series)
    result = RunResult(scenario, t, series, comparisons, tolerance_results)
    if out_dir is not None:
        write_outputs(result, out_dir)
    return result


def _fmt(x: float) -> str:
    if math.isnan(x):
        return ""
    return f"{x:.17g}"


def write_outputs(result: RunResult, out_dir):
    """observables_<method>.csv per method, density for wavefunction methods,
    and report.txt when at least two methods ran.  Deterministic bytes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scenario = result.scenario
    for method in scenario.methods:
        s = result.series[method]
        rows = [CSV_HEADER]
        for j, tj in enumerate(result.t):
            rows.append(
                ",".join(
                    [_fmt(tj)] + [_fmt(float(s.columns[obs][j])) for obs in OBSERVABLES]
                )
            )
        (out / f"observables_{method}.csv").write_text("\n".join(rows) + "\n")
        if s.density is not None:
            sites = np.arange(scenario.window[0], scenario.window[1] + 1)
            dens_rows = ["t,n,prob_renorm"]
            for j, tj in enumerate(result.t):
                t_str = _fmt(tj)
                row = s.density[j]
                for site, prob in zip(sites, row):
                    dens_rows.append(f"{t_str},{site},{_fmt(float(prob))}")
            (out / f"density_{method}.csv").write_text("\n".join(dens_rows) + "\n")
    if len(scenario.methods) >= 2:
        (out / "report.txt").write_text(report_text(result))


def report_text(result: RunResult) -> str:
    scenario = result.scenario
    lines = [
        f"scenario: {scenario.name}",
        f"methods: {', '.join(scenario.methods)}",
        f"samples: {result.t.size} (t = 0 .. {_fmt(float(result.t[-1]))})",
        "",
        "pairwise deviations (max over samples defined for both methods)",
        f"{'observable':<12} {'pair':<34} {'max_abs':>12} {'max_rel':>12} {'samples':>8}",
    ]
    for c in result.comparisons:
        pair = f"{c.method_a} vs {c.method_b}"
        lines.append(
            f"{c.observable:<12} {pair:<34} {c.max_abs:>12.5g} {c.max_rel:>12.5g} {c.samples:>8}"
        )
    lines.append("")
    if result.tolerance_results:
        lines.append("declared tolerances")
        for r in result.tolerance_results:
            verdict = "PASS" if r.passed else "FAIL"
            lines.append(
                f"{r.spec.label}: measured {r.measured:.5g} bound {r.spec.bound:.5g} -> {verdict}"
            )
    else:
        lines.append("declared tolerances: none")
    lines.append("")
    lines.append(f"result: {'PASS' if result.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"
