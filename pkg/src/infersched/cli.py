"""Command-line front end: solve, simulate, sweep and gen.

Exit codes are stable for scripting: 0 on success, 1 on a usage or config
error, 2 when the requested schedule is infeasible.  All data goes to
files or stdout; diagnostics go to stderr at the level selected by the
``INFERSCHED_LOG`` environment variable (error, warn, info or debug).
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import defaults, io, schedulers, sim
from .core import ChannelModel, ConstraintPair, ModelProfile, SlotInstance
from .exact import MemoryCapExceeded
from .io import InputError
from .sim import AccuracyRealization, ExecutionNoise, WorkloadSpec

log = logging.getLogger("infersched.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


@dataclasses.dataclass
class RunConfig:
    catalog: tuple[ModelProfile, ...]
    channel: ChannelModel
    constraints: ConstraintPair
    workload: WorkloadSpec
    noise: ExecutionNoise
    scheme_params: dict[str, dict]
    out_dir: Path
    seed: int
    slots: int
    threads: int


_CONFIG_KEYS = {
    "catalog",
    "channel",
    "constraints",
    "workload",
    "noise",
    "schemes",
    "out_dir",
    "seed",
    "slots",
    "threads",
    "device_power_w",
}
_WORKLOAD_KEYS = {"job_count", "jobs_per_slot", "median_mb", "sigma_log", "sizes_file", "seed"}
_NOISE_KEYS = {"time_jitter_cv", "accuracy_realization"}


def _reject_unknown(data: Mapping, allowed: set[str], where: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise InputError(f"{where}: unknown key(s) {', '.join(sorted(unknown))}")


def load_config(path: str | None, args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional config file and command-line flags."""
    data: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise InputError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise InputError(f"config {path}: invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise InputError(f"config {path}: expected a JSON object")
        _reject_unknown(data, _CONFIG_KEYS, f"config {path}")

    device_power = data.get("device_power_w", defaults.DEFAULT_DEVICE_POWER_W)

    catalog_src = data.get("catalog")
    if catalog_src is None:
        catalog = defaults.make_default_catalog(device_power)
    elif isinstance(catalog_src, str):
        catalog = io.load_catalog(catalog_src)
    else:
        catalog = io.parse_catalog(catalog_src, where="config.catalog")

    channel_src = data.get("channel")
    if channel_src is None:
        channel = defaults.make_default_channel()
    elif isinstance(channel_src, str):
        channel = io.load_channel(channel_src)
    else:
        channel = io.parse_channel(channel_src, where="config.channel")

    constraints_src = data.get("constraints")
    if constraints_src is None:
        constraints = defaults.make_default_constraints()
    else:
        constraints = io.parse_constraints(constraints_src, where="config.constraints")

    seed = args.seed if args.seed is not None else int(data.get("seed", 0))

    workload_src = dict(data.get("workload", {}))
    _reject_unknown(workload_src, _WORKLOAD_KEYS, "config.workload")
    workload_src.setdefault("seed", seed)
    try:
        workload = WorkloadSpec(**workload_src)
    except (TypeError, ValueError) as exc:
        raise InputError(f"config.workload: {exc}") from None

    noise_src = dict(data.get("noise", {}))
    _reject_unknown(noise_src, _NOISE_KEYS, "config.noise")
    if "accuracy_realization" in noise_src:
        try:
            noise_src["accuracy_realization"] = AccuracyRealization(noise_src["accuracy_realization"])
        except ValueError:
            raise InputError(
                "config.noise.accuracy_realization must be 'expected' or 'bernoulli'"
            ) from None
    try:
        noise = ExecutionNoise(**noise_src)
    except (TypeError, ValueError) as exc:
        raise InputError(f"config.noise: {exc}") from None

    scheme_params = data.get("schemes", {})
    if not isinstance(scheme_params, dict):
        raise InputError("config.schemes: expected an object keyed by scheme name")
    for name, overrides in scheme_params.items():
        if name not in schedulers.SCHEME_NAMES:
            raise InputError(
                f"config.schemes: unknown scheme {name!r}; valid schemes: "
                + ", ".join(schedulers.SCHEME_NAMES)
            )
        if not isinstance(overrides, dict):
            raise InputError(f"config.schemes.{name}: expected an object of overrides")

    out_dir = Path(args.out if args.out is not None else data.get("out_dir", "out"))
    slots = args.slots if getattr(args, "slots", None) is not None else int(data.get("slots", defaults.DEFAULT_SLOTS))
    threads = args.threads if args.threads is not None else int(data.get("threads", 1))

    return RunConfig(
        catalog=catalog,
        channel=channel,
        constraints=constraints,
        workload=workload,
        noise=noise,
        scheme_params={k: dict(v) for k, v in scheme_params.items()},
        out_dir=out_dir,
        seed=seed,
        slots=slots,
        threads=threads,
    )


def _scheme_overrides(config: RunConfig, scheme: str, args: argparse.Namespace) -> dict:
    overrides = dict(config.scheme_params.get(scheme, {}))
    flag_map = {
        "pop": "population_size",
        "gens": "max_generations",
        "tournament": "tournament_size",
        "mutation": "mutation_probability",
        "fade": "fading_factor",
        "tc": "termination_count",
        "walk": "walk_distance",
        "swarm": "swarm_size",
        "iters": "max_iterations",
        "inertia": "inertia",
        "cognitive": "cognitive",
        "social": "social",
        "ants": "ant_count",
        "evaporation": "evaporation",
        "alpha": "alpha",
        "beta": "beta",
        "time-quantum": "time_quantum",
        "energy-quantum": "energy_quantum",
    }
    for flag, param in flag_map.items():
        value = getattr(args, flag.replace("-", "_"), None)
        if value is not None:
            overrides[param] = value
    if scheme == "nsga2":
        # nsga2 shares the population flags but has no tournament or fading
        for key in ("tournament_size", "fading_factor", "termination_count", "walk_distance"):
            overrides.pop(key, None)
    return overrides


def _single_slot_instance(config: RunConfig) -> SlotInstance:
    jobs = sim.generate_workload(config.workload)
    slot = sim.slice_slots(jobs, config.workload.jobs_per_slot)[0]
    return SlotInstance(slot, config.catalog, config.channel, config.constraints)


def cmd_solve(args: argparse.Namespace) -> int:
    config = load_config(args.config, args)
    if args.instance is not None:
        instance = io.load_instance(args.instance)
    else:
        instance = _single_slot_instance(config)
    overrides = _scheme_overrides(config, args.scheme, args)
    result = schedulers.solve(args.scheme, instance, config.seed, overrides)

    print(f"scheme: {args.scheme}")
    print(f"feasible: {'yes' if result.feasible else 'no'}")
    if result.feasible:
        from .core import evaluate

        ev = evaluate(result.assignment, instance)
        print(f"objective (accuracy sum): {ev.fitness:.10g}")
        print(f"estimated time: {ev.total_time:.10g} ms of {instance.constraints.time_budget_ms:.10g}")
        print(f"estimated energy: {ev.total_energy:.10g} of {instance.constraints.energy_budget:.10g}")
        print("job  model")
        for job, gene in zip(instance.jobs, result.assignment.genes):
            print(f"{job.id:>4} {gene:>6}")
        payload = {
            "scheme": args.scheme,
            "genes": list(result.assignment.genes),
            "objective": ev.fitness,
            "est_time_ms": ev.total_time,
            "est_energy": ev.total_energy,
            "sched_time_ms": result.scheduling_time_ms,
            "feasible": True,
        }
    else:
        payload = {
            "scheme": args.scheme,
            "genes": [],
            "objective": None,
            "est_time_ms": None,
            "est_energy": None,
            "sched_time_ms": result.scheduling_time_ms,
            "feasible": False,
        }
    config.out_dir.mkdir(parents=True, exist_ok=True)
    out_path = config.out_dir / f"solve_{args.scheme}.json"
    out_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {out_path}")
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_config(args.config, args)
    schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
    if not schemes:
        raise InputError("no schemes selected")
    for scheme in schemes:
        if scheme not in schedulers.SCHEME_NAMES:
            raise InputError(
                f"unknown scheme {scheme!r}; valid schemes: " + ", ".join(schedulers.SCHEME_NAMES)
            )
    jobs = sim.generate_workload(config.workload)
    reports, summaries = sim.run_simulation(
        jobs,
        config.catalog,
        config.channel,
        config.constraints,
        schemes,
        config.noise,
        config.seed,
        jobs_per_slot=config.workload.jobs_per_slot,
        slots=config.slots,
        scheme_params=config.scheme_params,
        threads=config.threads,
    )
    config.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = config.out_dir / "slots.csv"
    json_path = config.out_dir / "summary.json"
    sim.write_slot_csv(reports, csv_path)
    metadata = {
        "time_budget_ms": config.constraints.time_budget_ms,
        "energy_budget": config.constraints.energy_budget,
        "slots": config.slots,
        "seed": config.seed,
        "schemes": schemes,
        "noise_cv": config.noise.time_jitter_cv,
    }
    sim.write_summary_json(summaries, metadata, json_path)
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config, args)
    if args.step <= 0:
        raise InputError("--step must be positive")
    if args.stop < args.start:
        raise InputError("--to must not be below --from")
    values = []
    value = float(args.start)
    while value <= args.stop + 1e-9:
        values.append(value)
        value += args.step
    if args.axis == "time":
        fixed = args.fixed_energy
        if fixed is None:
            raise InputError("--fixed-energy is required for a time sweep")
    else:
        fixed = args.fixed_time
        if fixed is None:
            raise InputError("--fixed-time is required for an energy sweep")
    jobs = sim.generate_workload(config.workload)
    rows = sim.sweep_constraint(
        jobs,
        config.catalog,
        config.channel,
        args.axis,
        values,
        fixed,
        args.scheme,
        jobs_per_slot=config.workload.jobs_per_slot,
        slots=args.slots if args.slots is not None else 10,
        seed=config.seed,
        scheme_params=config.scheme_params.get(args.scheme),
    )
    config.out_dir.mkdir(parents=True, exist_ok=True)
    out_path = config.out_dir / f"sweep_{args.axis}.csv"
    sim.write_sweep_csv(rows, out_path)
    print(f"wrote {out_path}")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    config = load_config(args.config, args)
    workload = config.workload
    if args.count is not None or args.median_mb is not None or args.sigma is not None:
        workload = dataclasses.replace(
            workload,
            job_count=args.count if args.count is not None else workload.job_count,
            median_mb=args.median_mb if args.median_mb is not None else workload.median_mb,
            sigma_log=args.sigma if args.sigma is not None else workload.sigma_log,
        )
    jobs = sim.generate_workload(workload)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    sizes_path = config.out_dir / "sizes.txt"
    sizes_path.write_text(
        "\n".join(format(job.size_mb, ".10g") for job in jobs) + "\n", encoding="utf-8"
    )
    catalog_path = config.out_dir / "catalog.json"
    catalog_path.write_text(
        json.dumps(io.catalog_to_json(config.catalog), indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote {sizes_path}")
    print(f"wrote {catalog_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infersched",
        description="Schedulers and a slot simulator for selective inference-task offloading.",
    )
    # Global flags are accepted both before and after the subcommand; the
    # SUPPRESS default keeps an unset subcommand flag from clobbering a
    # value parsed at the top level.
    common = argparse.ArgumentParser(add_help=False)
    for args, kwargs in (
        (("--config",), {"help": "JSON config file"}),
        (("--seed",), {"type": int, "help": "master seed (default 0)"}),
        (("--out",), {"help": "output directory (default ./out)"}),
        (("--threads",), {"type": int, "help": "parallel cells in simulate"}),
    ):
        parser.add_argument(*args, default=None, **kwargs)
        common.add_argument(*args, default=argparse.SUPPRESS, **kwargs)
    sub = parser.add_subparsers(dest="command", required=True)

    scheme_names = ", ".join(schedulers.SCHEME_NAMES)

    solve = sub.add_parser("solve", parents=[common], help="schedule one slot and print the assignment")
    solve.add_argument("--scheme", required=True, choices=schedulers.SCHEME_NAMES, metavar="SCHEME", help=scheme_names)
    solve.add_argument("--instance", help="instance JSON file (default: generated slot)")
    for flag, typ in (
        ("--pop", int),
        ("--gens", int),
        ("--tournament", int),
        ("--tc", int),
        ("--walk", int),
        ("--swarm", int),
        ("--iters", int),
        ("--ants", int),
    ):
        solve.add_argument(flag, type=typ, default=None)
    for flag in ("--mutation", "--fade", "--inertia", "--cognitive", "--social", "--evaporation", "--alpha", "--beta", "--time-quantum", "--energy-quantum"):
        solve.add_argument(flag, type=float, default=None)

    simulate = sub.add_parser("simulate", parents=[common], help="run the slot simulation and write CSV + summary")
    simulate.add_argument("--schemes", required=True, help=f"comma-separated subset of: {scheme_names}")
    simulate.add_argument("--slots", type=int, default=None, help="slot count (default 100)")

    sweep = sub.add_parser("sweep", parents=[common], help="model-allocation histogram across one budget axis")
    sweep.add_argument("--axis", required=True, choices=("time", "energy"))
    sweep.add_argument("--from", dest="start", type=float, required=True)
    sweep.add_argument("--to", dest="stop", type=float, required=True)
    sweep.add_argument("--step", type=float, required=True)
    sweep.add_argument("--fixed-energy", type=float, default=None)
    sweep.add_argument("--fixed-time", type=float, default=None)
    sweep.add_argument("--scheme", default="lgsto", choices=schedulers.SCHEME_NAMES, metavar="SCHEME")
    sweep.add_argument("--slots", type=int, default=None, help="slots per constraint value (default 10)")

    gen = sub.add_parser("gen", parents=[common], help="write a workload sizes file and a catalog template")
    gen.add_argument("--count", type=int, default=None, help="number of sizes (default 3923)")
    gen.add_argument("--median-mb", type=float, default=None)
    gen.add_argument("--sigma", type=float, default=None)

    return parser


_COMMANDS = {
    "solve": cmd_solve,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "gen": cmd_gen,
}


def _setup_logging() -> None:
    level_name = os.environ.get("INFERSCHED_LOG", "warn").lower()
    level = _LOG_LEVELS.get(level_name, logging.WARNING)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except InputError as exc:
        log.error("%s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MemoryCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:  # console script target
    sys.exit(main())
