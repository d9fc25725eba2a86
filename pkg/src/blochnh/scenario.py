"""Scenario files: declarative run configurations.

A scenario is a TOML file with sections [model], [initial], [grid],
[time], [run] and optional [tolerances] and [variants].  Complex numbers
are always two-element arrays [re, im]; TOML has no complex type and
guessing is worse than being strict.  A [variants] table turns one file
into several runs by deep-merging each variant's overrides into the base
document; files with variants run the variants only, since the base is
usually incomplete on its own (it is the shared part).

Validation happens entirely at load time and errors name the offending
key, so the engines behind the runner never see a malformed request.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .model import ModelParams, identify_preset

__all__ = [
    "Scenario",
    "ToleranceSpec",
    "ScenarioError",
    "METHODS",
    "OBSERVABLES",
    "METHOD_COLUMNS",
    "WAVEFUNCTION_METHODS",
    "BUNDLED_SCENARIOS",
    "load_scenario_text",
    "load_scenario_file",
    "resolve_scenarios",
    "bundled_scenario_text",
]

METHODS = (
    "direct",
    "closed_form",
    "wei_norman",
    "classical",
    "narrow",
    "ensemble",
    "perturbative",
)

WAVEFUNCTION_METHODS = frozenset({"direct", "closed_form", "wei_norman"})

OBSERVABLES = ("P", "logP", "n_mean", "p_circular", "n_var",
               "sigma_pp", "sigma_pq", "sigma_qq")

_QUANTUM_COLUMNS = frozenset({"P", "logP", "n_mean", "p_circular", "n_var"})

# Which CSV columns a method can fill; tolerance declarations are checked
# against this so a report never has to compare an undefined column.
METHOD_COLUMNS = {
    "direct": _QUANTUM_COLUMNS,
    "closed_form": _QUANTUM_COLUMNS,
    "wei_norman": _QUANTUM_COLUMNS,
    "classical": frozenset(OBSERVABLES),
    "narrow": frozenset(OBSERVABLES),
    "ensemble": _QUANTUM_COLUMNS,
    "perturbative": frozenset({"p_circular", "sigma_pp"}),
}

# One bundled scenario per reproduced figure; the ambiguous broad-packet
# covariance row ships in both readings.
BUNDLED_SCENARIOS = (
    "hn_broad",
    "hn_broad_cov_caption",
    "hn_broad_cov_text",
    "hn_norm_pm_mu",
    "hn_p_deviation",
    "hn_delta",
    "hn_intermediate",
    "ic_broad_three_betas",
    "ic_delta",
)

_GAUSSIAN_METHODS = frozenset({"classical", "narrow", "perturbative"})
_PRESET_METHODS = frozenset({"closed_form", "perturbative"})

_TOP_KEYS = frozenset({"description", "model", "initial", "grid", "time", "run",
                       "tolerances", "variants"})
_NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")


class ScenarioError(ValueError):
    """A scenario document failed validation; the message names the key."""


@dataclass(frozen=True)
class ToleranceSpec:
    """One declared bound: deviation of observable between two methods."""

    observable: str
    method_a: str
    method_b: str
    bound: float
    relative: bool

    @property
    def label(self) -> str:
        suffix = "_rel" if self.relative else ""
        return f"{self.observable} {self.method_a}_vs_{self.method_b}{suffix}"


@dataclass(frozen=True)
class Scenario:
    """A fully validated run request."""

    name: str
    description: str
    params: ModelParams
    initial_kind: str
    beta: complex | None
    q0: float
    p0: float
    site: int | None
    window: tuple[int, int]
    kappa_points: int | None
    t_max: float
    dt: float
    output_every: int
    methods: tuple[str, ...]
    ensemble_size: int | None
    tolerances: tuple[ToleranceSpec, ...]

    def time_grid(self):
        import numpy as np

        step = self.dt * self.output_every
        count = int(math.floor(self.t_max * (1.0 + 1e-12) / step + 1e-12)) + 1
        return np.arange(count) * step


def _fail(key: str, problem: str):
    raise ScenarioError(f"{key}: {problem}")


def _number(table, section, key, required=True, default=None):
    if key not in table:
        if required:
            _fail(f"[{section}].{key}", "required key is missing")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        _fail(f"[{section}].{key}", f"expected a number, got {v!r}")
    v = float(v)
    if not math.isfinite(v):
        _fail(f"[{section}].{key}", "must be finite")
    return v


def _integer(table, section, key, required=True, default=None):
    if key not in table:
        if required:
            _fail(f"[{section}].{key}", "required key is missing")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(f"[{section}].{key}", f"expected an integer, got {v!r}")
    return v


def _complex_pair(table, section, key, required=True):
    if key not in table:
        if required:
            _fail(f"[{section}].{key}", "required key is missing")
        return None
    v = table[key]
    ok = (
        isinstance(v, list)
        and len(v) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
    )
    if not ok:
        _fail(f"[{section}].{key}", f"complex values are written [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def _section(doc, name, required=True):
    if name not in doc:
        if required:
            _fail(f"[{name}]", "required section is missing")
        return {}
    v = doc[name]
    if not isinstance(v, dict):
        _fail(f"[{name}]", "must be a table")
    return v


def _reject_unknown(table, section, known):
    for key in table:
        if key not in known:
            _fail(f"[{section}].{key}", "unknown key")


def _parse_model(doc) -> ModelParams:
    sec = _section(doc, "model")
    if "preset" in sec:
        _reject_unknown(sec, "model", {"preset", "g", "mu", "F"})
        preset = sec["preset"]
        force = _number(sec, "model", "F")
        if preset == "hatano_nelson":
            g = _number(sec, "model", "g")
            mu = _number(sec, "model", "mu")
            return ModelParams.hatano_nelson(g, mu, force)
        if preset == "imaginary_coupling":
            if "mu" in sec:
                _fail("[model].mu", "not a parameter of the imaginary_coupling preset")
            g = _number(sec, "model", "g")
            return ModelParams.imaginary_coupling(g, force)
        _fail("[model].preset", f"unknown preset {preset!r}")
    _reject_unknown(sec, "model", {"g1", "g2", "F"})
    g1 = _complex_pair(sec, "model", "g1")
    g2 = _complex_pair(sec, "model", "g2")
    force = _number(sec, "model", "F")
    return ModelParams(g1, g2, force)


def _parse_initial(doc):
    sec = _section(doc, "initial")
    kind = sec.get("kind")
    if kind == "gaussian":
        _reject_unknown(sec, "initial", {"kind", "beta", "q0", "p0"})
        beta = _complex_pair(sec, "initial", "beta")
        if not (beta.real > 0.0):
            _fail("[initial].beta", f"Re(beta) must be positive, got {beta!r}")
        q0 = _number(sec, "initial", "q0", required=False, default=0.0)
        p0 = _number(sec, "initial", "p0", required=False, default=0.0)
        return kind, beta, q0, p0, None
    if kind == "site":
        _reject_unknown(sec, "initial", {"kind", "site"})
        site = _integer(sec, "initial", "site")
        return kind, None, float(site), 0.0, site
    _fail("[initial].kind", f"must be 'gaussian' or 'site', got {kind!r}")


def _parse_grid(doc):
    sec = _section(doc, "grid")
    _reject_unknown(sec, "grid", {"n_min", "n_max", "kappa_points"})
    n_min = _integer(sec, "grid", "n_min")
    n_max = _integer(sec, "grid", "n_max")
    if n_max - n_min + 1 < 3:
        _fail("[grid].n_max", f"window [{n_min}, {n_max}] has fewer than 3 sites")
    kappa_points = _integer(sec, "grid", "kappa_points", required=False)
    if kappa_points is not None and kappa_points < n_max - n_min + 1:
        _fail("[grid].kappa_points", "must cover the site window")
    return (n_min, n_max), kappa_points


def _parse_time(doc):
    sec = _section(doc, "time")
    _reject_unknown(sec, "time", {"t_max", "dt", "output_every"})
    t_max = _number(sec, "time", "t_max")
    if t_max <= 0.0:
        _fail("[time].t_max", "must be positive")
    dt = _number(sec, "time", "dt")
    if dt <= 0.0:
        _fail("[time].dt", "must be positive")
    output_every = _integer(sec, "time", "output_every", required=False, default=1)
    if output_every < 1:
        _fail("[time].output_every", "must be a positive integer")
    return t_max, dt, output_every


def _parse_run(doc, params, initial_kind):
    sec = _section(doc, "run")
    _reject_unknown(sec, "run", {"methods", "ensemble_size"})
    methods = sec.get("methods")
    if not isinstance(methods, list) or not methods:
        _fail("[run].methods", "must be a non-empty list of method names")
    seen = []
    for m in methods:
        if m not in METHODS:
            _fail("[run].methods", f"unknown method {m!r} (known: {', '.join(METHODS)})")
        if m in seen:
            _fail("[run].methods", f"method {m!r} listed twice")
        seen.append(m)
    if initial_kind != "gaussian":
        bad = _GAUSSIAN_METHODS.intersection(seen)
        if bad:
            _fail("[run].methods",
                  f"{sorted(bad)} need a gaussian initial state, not {initial_kind!r}")
    if identify_preset(params) is None:
        bad = _PRESET_METHODS.intersection(seen)
        if bad:
            _fail("[run].methods",
                  f"{sorted(bad)} exist only for the preset hopping patterns")
    ensemble_size = _integer(sec, "run", "ensemble_size", required=False)
    if ensemble_size is not None and ensemble_size < 16:
        _fail("[run].ensemble_size", "must be at least 16")
    if "ensemble" in seen and ensemble_size is None:
        _fail("[run].ensemble_size", "required when the ensemble method is requested")
    return tuple(seen), ensemble_size


def _parse_tolerances(doc, methods):
    sec = _section(doc, "tolerances", required=False)
    specs = []
    for obs, table in sec.items():
        if obs not in OBSERVABLES:
            _fail(f"[tolerances].{obs}",
                  f"unknown observable (known: {', '.join(OBSERVABLES)})")
        if not isinstance(table, dict):
            _fail(f"[tolerances].{obs}", "must be a table of <a>_vs_<b> bounds")
        for key, bound in table.items():
            relative = key.endswith("_rel")
            pair = key[:-4] if relative else key
            parts = pair.split("_vs_")
            if len(parts) != 2:
                _fail(f"[tolerances].{obs}.{key}",
                      "keys look like <methodA>_vs_<methodB> or ..._rel")
            a, b = parts
            for m in (a, b):
                if m not in METHODS:
                    _fail(f"[tolerances].{obs}.{key}", f"unknown method {m!r}")
                if m not in methods:
                    _fail(f"[tolerances].{obs}.{key}",
                          f"method {m!r} is not in [run].methods")
                if obs not in METHOD_COLUMNS[m]:
                    _fail(f"[tolerances].{obs}.{key}",
                          f"method {m!r} does not produce the {obs} column")
            if a == b:
                _fail(f"[tolerances].{obs}.{key}", "a method cannot be compared to itself")
            if isinstance(bound, bool) or not isinstance(bound, (int, float)):
                _fail(f"[tolerances].{obs}.{key}", f"bound must be a number, got {bound!r}")
            bound = float(bound)
            if not (bound >= 0.0 and math.isfinite(bound)):
                _fail(f"[tolerances].{obs}.{key}", "bound must be finite and non-negative")
            specs.append(ToleranceSpec(obs, a, b, bound, relative))
    return tuple(specs)


def _build_scenario(doc, name: str) -> Scenario:
    for key in doc:
        if key not in _TOP_KEYS:
            _fail(f"[{key}]", "unknown top-level key")
    description = doc.get("description", "")
    if not isinstance(description, str):
        _fail("description", "must be a string")
    params = _parse_model(doc)
    initial_kind, beta, q0, p0, site = _parse_initial(doc)
    window, kappa_points = _parse_grid(doc)
    t_max, dt, output_every = _parse_time(doc)
    methods, ensemble_size = _parse_run(doc, params, initial_kind)
    tolerances = _parse_tolerances(doc, methods)
    if site is not None and not (window[0] < site < window[1]):
        _fail("[initial].site", f"site {site} not strictly inside the window {window}")
    return Scenario(
        name=name,
        description=description,
        params=params,
        initial_kind=initial_kind,
        beta=beta,
        q0=q0,
        p0=p0,
        site=site,
        window=window,
        kappa_points=kappa_points,
        t_max=t_max,
        dt=dt,
        output_every=output_every,
        methods=methods,
        ensemble_size=ensemble_size,
        tolerances=tolerances,
    )


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def load_scenario_text(text: str, name: str):
    """Parse and validate a scenario document; returns the list of runs."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"not valid TOML: {exc}") from exc
    variants = doc.pop("variants", None)
    if variants is None:
        return [_build_scenario(doc, name)]
    if not isinstance(variants, dict) or not variants:
        _fail("[variants]", "must be a non-empty table of named override tables")
    runs = []
    for variant_name, override in variants.items():
        if not _NAME_RE.match(variant_name):
            _fail(f"[variants].{variant_name}", "names use letters, digits and underscores")
        if not isinstance(override, dict):
            _fail(f"[variants].{variant_name}", "must be a table of section overrides")
        merged = _deep_merge(doc, override)
        runs.append(_build_scenario(merged, f"{name}:{variant_name}"))
    return runs


def load_scenario_file(path) -> list:
    path = Path(path)
    return load_scenario_text(path.read_text(encoding="utf-8"), path.stem)


def bundled_scenario_text(name: str) -> str:
    """Raw TOML of a bundled scenario; FileNotFoundError if absent."""
    res = resources.files("blochnh") / "scenarios" / f"{name}.toml"
    return res.read_text(encoding="utf-8")


def resolve_scenarios(ref: str):
    """A path or a bundled name -> (base name, list of runs)."""
    path = Path(ref)
    if path.suffix == ".toml" or path.exists():
        return path.stem, load_scenario_file(path)
    try:
        text = bundled_scenario_text(ref)
    except FileNotFoundError:
        raise ScenarioError(
            f"{ref!r} is neither a scenario file nor a bundled scenario name "
            f"(bundled: {', '.join(BUNDLED_SCENARIOS)})"
        ) from None
    return ref, load_scenario_text(text, ref)
