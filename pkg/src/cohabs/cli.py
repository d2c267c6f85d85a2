"""Command-line entry point.

Subcommands map onto the experiment operations; every run is driven by a JSON
config file, optionally patched with --set key=value overrides, and prints a
JSON summary to stdout.  Exit codes: 0 success, 2 config/parse failure,
3 truncation failure, 4 integration failure, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiments
from .errors import ConfigError, IntegrationError, SimulationError, TruncationError
from .experiments import ScenarioConfig, load_config
from .observables import WignerGridSpec, negativity_volume, save_wigner_csv, \
    save_wigner_text, wigner
from .hilbert import partial_trace
from .models import OSC_LABEL

OUTPUT_ROOT_ENV = "COHABS_OUTPUT_ROOT"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="scenario JSON document")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config key (dotted path)")
    parser.add_argument("--output", default=None,
                        help="output directory (default: $COHABS_OUTPUT_ROOT/<name>)")
    parser.add_argument("--jobs", type=int, default=1, help="parallel worker cap")
    parser.add_argument("--dry-run", action="store_true",
                        help="validate the config and print the resolved parameters")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohabs",
        description="Coherence generation by combined linear and nonlinear absorption")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("evolve", "continuous evolution of one scenario"),
        ("switch", "piecewise interaction switching"),
        ("sweep", "scenario run with optional sweep axes (n or omega/Omega)"),
        ("wigner", "Wigner grid of the configured state"),
        ("robustness", "input-state and environment variants"),
        ("completed", "pumped three-mode completion versus the two-body model"),
        ("landscape", "coherence over initial occupation and coupling ratio"),
    ):
        _add_common(sub.add_parser(name, help=doc))
    return parser


def _resolve_output(config: ScenarioConfig, args) -> str | None:
    if args.output:
        return args.output
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root:
        return os.path.join(root, config.name)
    return None


def _print_summary(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _cmd_scenario(config: ScenarioConfig, args) -> dict:
    run = experiments.run_scenario(config, output_dir=_resolve_output(config, args))
    summary = run.summary()
    summary["t_at_max"] = run.tau_at_max / config.model.tau_scale()
    return summary


def _cmd_sweep(config: ScenarioConfig, args) -> dict:
    axes = config.sweep
    out = _resolve_output(config, args)
    if "n" in axes:
        result = experiments.max_coherence_vs_n(config, axes["n"], jobs=args.jobs,
                                                output_dir=out)
        return result.summary()
    if "omega" in axes and "Omega" in axes:
        result = experiments.weak_coupling_scan(config, axes["omega"], axes["Omega"],
                                                jobs=args.jobs, output_dir=out)
        return result.summary()
    if "p" in axes:
        result = experiments.admixture_sweep(config, axes["p"], jobs=args.jobs,
                                             output_dir=out)
        return result.summary()
    if axes:
        raise ConfigError(f"sweep supports axes n, p, or omega+Omega, got {sorted(axes)}")
    return _cmd_scenario(config, args)


def _cmd_landscape(config: ScenarioConfig, args) -> dict:
    axes = config.sweep
    if "n" not in axes or "G" not in axes:
        raise ConfigError("landscape needs sweep axes n and G")
    result = experiments.coherence_landscape(config, axes["n"], axes["G"],
                                             jobs=args.jobs,
                                             output_dir=_resolve_output(config, args))
    return result.summary()


def _cmd_completed(config: ScenarioConfig, args) -> dict:
    betas = config.sweep.get("beta")
    if not betas:
        raise ConfigError("completed needs a sweep axis beta")
    result = experiments.completed_model_run(config, betas, jobs=args.jobs,
                                             output_dir=_resolve_output(config, args))
    return result.summary()


def _cmd_robustness(config: ScenarioConfig, args) -> dict:
    return experiments.robustness_suite(config, jobs=args.jobs,
                                        output_dir=_resolve_output(config, args))


def _cmd_wigner(config: ScenarioConfig, args) -> dict:
    from . import states
    model = config.model
    layout = model.layout()
    state = states.make_state(config.initial, layout, pump_amplitude=model.pump)
    tau = config.schedule.tau_max if config.schedule.points > 1 else 0.0
    if tau > 0:
        prop = experiments._propagator_for(model)
        state = prop.state_at(state, tau / model.tau_scale())
    rho = partial_trace(state, OSC_LABEL).data
    grid = wigner(rho, WignerGridSpec.for_state(rho, points=config.diagnostics.wigner_points))
    out = _resolve_output(config, args)
    payload = {
        "name": config.name,
        "tau": tau,
        "center_value": float(grid.values[grid.values.shape[0] // 2,
                                          grid.values.shape[1] // 2]),
        "normalization_integral": grid.normalization_integral,
        "negativity_volume": negativity_volume(grid),
    }
    if out:
        os.makedirs(out, exist_ok=True)
        save_wigner_text(grid, os.path.join(out, "wigner.txt"))
        save_wigner_csv(grid, os.path.join(out, "wigner.csv"))
        payload["files"] = ["wigner.txt", "wigner.csv"]
    return payload


_COMMANDS = {
    "evolve": _cmd_scenario,
    "switch": _cmd_scenario,
    "sweep": _cmd_sweep,
    "wigner": _cmd_wigner,
    "robustness": _cmd_robustness,
    "completed": _cmd_completed,
    "landscape": _cmd_landscape,
}


def dispatch(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config).apply_overrides(args.overrides)
        if args.command == "switch" and config.schedule.kind != "switch":
            raise ConfigError("the switch subcommand needs a switch schedule")
        if args.dry_run:
            _print_summary({"resolved_config": config.to_dict(),
                            "config_hash": config.hash(),
                            "tau_scale": config.model.tau_scale(),
                            "cutoff": config.ladder()[-1]})
            return 0
        _print_summary(_COMMANDS[args.command](config, args))
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
