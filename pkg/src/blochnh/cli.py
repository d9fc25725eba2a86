"""Command-line front end: run, verify, list-scenarios.

Exit status is 0 only when every declared tolerance passed and no engine
diagnostic fired; failures print one line naming the stage that failed
(validation, truncation leak, sigma blow-up, tolerance failure) so shell
pipelines can tell configuration problems from physics disagreements.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from .classical import CovarianceBlowupError, PerturbativeBreakdownError
from .quantum import TruncationLeakError
from .runner import report_text, run_scenario
from .scenario import (
    BUNDLED_SCENARIOS,
    ScenarioError,
    bundled_scenario_text,
    load_scenario_text,
    resolve_scenarios,
)

__all__ = ["main"]

_ENGINE_ERRORS = (
    ScenarioError,
    TruncationLeakError,
    CovarianceBlowupError,
    PerturbativeBreakdownError,
    ValueError,
)


def _stage(exc: Exception) -> str:
    if isinstance(exc, TruncationLeakError):
        return "truncation leak"
    if isinstance(exc, (CovarianceBlowupError, PerturbativeBreakdownError)):
        return "sigma blow-up"
    # ScenarioError and the engines' own precondition ValueErrors both mean
    # the request was bad, not the physics.
    return "validation"


def _out_path(base_dir: Path, scenario_name: str) -> Path:
    parts = scenario_name.split(":", 1)
    out = base_dir / parts[0]
    if len(parts) == 2:
        out = out / parts[1]
    return out


def _cmd_run(args) -> int:
    try:
        _, runs = resolve_scenarios(args.scenario)
    except ScenarioError as exc:
        print(f"error: validation: {exc}")
        return 1
    status = 0
    base_dir = Path(args.out_dir)
    for scenario in runs:
        out = _out_path(base_dir, scenario.name)
        try:
            result = run_scenario(scenario, out)
        except _ENGINE_ERRORS as exc:
            print(f"{scenario.name}: error: {_stage(exc)}: {exc}")
            status = 1
            continue
        if result.passed:
            print(f"{scenario.name}: PASS -> {out}")
        else:
            failed = [r.spec.label for r in result.tolerance_results if not r.passed]
            print(f"{scenario.name}: error: tolerance failure: {', '.join(failed)} -> {out}")
            status = 1
    return status


def _cmd_verify(args) -> int:
    try:
        _, runs = resolve_scenarios(args.scenario)
    except ScenarioError as exc:
        print(f"error: validation: {exc}")
        return 1
    status = 0
    for scenario in runs:
        if not scenario.tolerances:
            print(f"{scenario.name}: error: validation: verify needs declared tolerances")
            status = 1
            continue
        try:
            result = run_scenario(scenario, None)
        except _ENGINE_ERRORS as exc:
            print(f"{scenario.name}: error: {_stage(exc)}: {exc}")
            status = 1
            continue
        print(report_text(result), end="")
        if not result.passed:
            status = 1
    return status


def _cmd_list(_args) -> int:
    for name in BUNDLED_SCENARIOS:
        try:
            text = bundled_scenario_text(name)
        except FileNotFoundError:
            print(f"{name:<24} MISSING")
            continue
        try:
            runs = load_scenario_text(text, name)
        except ScenarioError as exc:
            print(f"{name:<24} INVALID: {exc}")
            continue
        suffix = f" ({len(runs)} variants)" if len(runs) > 1 else ""
        print(f"{name:<24} {runs[0].description}{suffix}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="blochnh",
        description="Tight-binding lattice dynamics under a constant force "
        "with asymmetric or dissipative hopping: cross-checked quantum, "
        "closed-form and quasiclassical propagation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario and write CSV output")
    p_run.add_argument("scenario", help="scenario file path or bundled scenario name")
    p_run.add_argument("--out-dir", default="./out", help="output directory (default ./out)")
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify", help="run in memory and evaluate tolerances")
    p_verify.add_argument("scenario", help="scenario file path or bundled scenario name")
    p_verify.set_defaults(func=_cmd_verify)

    p_list = sub.add_parser("list-scenarios", help="list the bundled scenarios")
    p_list.set_defaults(func=_cmd_list)

    args = parser.parse_args(argv)
    return args.func(args)
