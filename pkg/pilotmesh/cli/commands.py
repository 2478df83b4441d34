import logging
from collections.abc import Iterator
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any

import orjson
import typer

from pilotmesh.exceptions import (
    InfeasibleInstanceError,
    OracleGuardError,
    PilotMeshError,
    PilotMeshValidationError,
)
from pilotmesh.io import (
    artifact_meta,
    decode_json,
    load_model,
    validate_model,
    write_csv,
    write_json,
    write_jsonl,
)
from pilotmesh.model import ScenarioFile
from pilotmesh.overlay import LookupResult
from pilotmesh.qoe import SatisfactionReport, random_harmonic_experiment, us_overall
from pilotmesh.sim import (
    METRIC_COLUMNS,
    Mode,
    RunMetrics,
    Scenario,
    SimConfig,
    Strategy,
    generate_scenario,
    run_many,
    run_modes,
    scenario_from_file,
)
from pilotmesh.solver import Instance, SolverLimits, brute_force_oracle, solve

from .output import formatter

logger = logging.getLogger("pilotmesh.cli")

app = typer.Typer(
    name="pilotmesh",
    help="Pilot selection, two-tier D2D overlay lookups and QoE scoring",
    add_completion=False,
    no_args_is_help=True,
)

EXIT_MISSING_FILE = 3
EXIT_MALFORMED = 4
EXIT_INFEASIBLE = 5
EXIT_ORACLE_GUARD = 6

TRACE_COLUMNS = ("k", "dual", "best_dual", "step_scale", "step")


class ModeChoice(str, Enum):
    D2D_ONLY = "d2d_only"
    DHT_D2D = "dht_d2d"
    BOTH = "both"

    def modes(self) -> tuple[Mode, ...]:
        if self is ModeChoice.BOTH:
            return (Mode.D2D_ONLY, Mode.DHT_D2D)
        return (Mode(self.value),)


@contextmanager
def guarded() -> Iterator[None]:
    """Map library errors onto exit codes and a one-line message on stderr."""
    try:
        yield
    except FileNotFoundError as e:
        formatter.error(f"File not found: {e.filename}")
        raise typer.Exit(EXIT_MISSING_FILE) from e
    except PilotMeshValidationError as e:
        e.log(logging.DEBUG)
        formatter.error(str(e))
        raise typer.Exit(EXIT_MALFORMED) from e
    except InfeasibleInstanceError as e:
        formatter.error(str(e))
        raise typer.Exit(EXIT_INFEASIBLE) from e
    except OracleGuardError as e:
        formatter.error(str(e))
        raise typer.Exit(EXIT_ORACLE_GUARD) from e
    except PilotMeshError as e:
        formatter.error(str(e))
        raise typer.Exit(1) from e


def parse_seeds(spec: str) -> list[int]:
    """``a..b`` (inclusive) or a comma-separated list."""
    spec = spec.strip()
    try:
        if ".." in spec:
            start, stop = (int(part) for part in spec.split("..", 1))
            seeds = list(range(start, stop + 1))
        else:
            seeds = [int(part) for part in spec.split(",") if part.strip()]
    except ValueError as e:
        msg = f"Cannot parse seeds '{spec}'"
        raise PilotMeshValidationError(msg) from e
    if not seeds:
        msg = f"Seed range '{spec}' is empty"
        raise PilotMeshValidationError(msg)
    return seeds


def _base_config(config: Path | None) -> SimConfig:
    return load_model(config, SimConfig) if config is not None else SimConfig()


def _load_problem(path: Path, config: Path | None) -> tuple[Instance, dict[str, Any]]:
    """An Instance JSON, or a Scenario JSON rebuilt into its instance."""
    data = decode_json(path.read_bytes(), path.name)
    if isinstance(data, dict) and "devices" in data:
        scenario_file = validate_model(data, ScenarioFile, path.name)
        cfg = load_model(config, SimConfig) if config is not None else None
        scenario = scenario_from_file(scenario_file, cfg)
        return scenario.instance, artifact_meta(scenario.config.seed, scenario.config.model_dump(mode="json"))
    instance = validate_model(data, Instance, path.name)
    return instance, artifact_meta(None, {"input": path.name})


@app.command()
def gen(
    seed: int = typer.Option(0, "--seed", help="Scenario seed"),
    config: Path | None = typer.Option(None, "--config", help="SimConfig JSON file"),  # noqa: B008
    users: int | None = typer.Option(None, "--users", help="Number of D2D users"),
    pilots: int | None = typer.Option(None, "--pilots", help="Number of pilots"),
    out: Path = typer.Option(Path("scenario.json"), "-o", "--out", help="Scenario file to write"),  # noqa: B008
) -> None:
    """Generate a random single-cell scenario."""
    with guarded():
        cfg = _base_config(config).with_overrides(seed=seed, n_users=users, n_pilots=pilots)
        scenario = generate_scenario(cfg)
        write_json(out, scenario.to_file())
    formatter.success(f"Scenario with {cfg.n_users} devices written to {out}")


@app.command(name="solve")
def solve_command(
    input_file: Path = typer.Argument(..., metavar="INPUT", help="Instance or Scenario JSON"),  # noqa: B008
    config: Path | None = typer.Option(None, "--config", help="SimConfig JSON overriding the embedded one"),  # noqa: B008
    max_iter: int = typer.Option(200, "--max-iter", help="Multiplier iterations"),
    pilot_data_once: bool = typer.Option(  # noqa: FBT001
        False,  # noqa: FBT003
        "--pilot-data-once",
        help="Count a pilot's own data once instead of once per member",
    ),
    no_polish: bool = typer.Option(False, "--no-polish", help="Skip the swap search"),  # noqa: FBT001, FBT003
    trace: bool = typer.Option(False, "--trace", help="Also write trace.csv"),  # noqa: FBT001, FBT003
    out: Path = typer.Option(Path(), "-o", "--out", help="Output directory"),  # noqa: B008
) -> None:
    """Solve the capacitated pilot-selection problem by Lagrangian relaxation."""
    with guarded():
        instance, meta = _load_problem(input_file, config)
        limits = SolverLimits(max_iter=max_iter, pilot_data_once=pilot_data_once, polish=not no_polish)
        report = solve(instance, limits)
        write_json(out / "solve.json", report.to_dict(instance, meta))
        if trace:
            rows = [{column: getattr(row, column) for column in TRACE_COLUMNS} for row in report.trace]
            write_csv(out / "trace.csv", meta, TRACE_COLUMNS, rows)

    formatter.header("Pilot selection")
    formatter.key_value("Open pilots", [instance.pilot_label(j) for j in report.open_pilots])
    formatter.key_value("Iterations", report.iterations)
    formatter.key_value("Converged at", report.converged_at)
    formatter.key_value("Capacity violations", len(report.violations))
    formatter.metric("Objective", report.primal_objective)
    formatter.metric("Dual bound", report.dual_bound)


@app.command()
def oracle(
    input_file: Path = typer.Argument(..., metavar="INPUT", help="Instance or Scenario JSON"),  # noqa: B008
    config: Path | None = typer.Option(None, "--config", help="SimConfig JSON overriding the embedded one"),  # noqa: B008
    pilot_data_once: bool = typer.Option(  # noqa: FBT001
        False,  # noqa: FBT003
        "--pilot-data-once",
        help="Count a pilot's own data once instead of once per member",
    ),
    out: Path = typer.Option(Path(), "-o", "--out", help="Output directory"),  # noqa: B008
) -> None:
    """Exact optimum by exhaustive enumeration (small instances only)."""
    with guarded():
        instance, meta = _load_problem(input_file, config)
        result = brute_force_oracle(instance, pilot_data_once=pilot_data_once)
        pilot_of = result.assignment.pilot_of
        write_json(
            out / "oracle.json",
            {
                "meta": meta,
                "objective": result.objective,
                "open_pilots": [instance.pilot_label(j) for j in result.open_pilots],
                "assignment": [instance.pilot_label(int(j)) for j in pilot_of],
                "subsets_checked": result.subsets_checked,
            },
        )

    formatter.header("Exact optimum")
    formatter.key_value("Open pilots", [instance.pilot_label(j) for j in result.open_pilots])
    formatter.key_value("Subsets checked", result.subsets_checked)
    formatter.metric("Objective", result.objective)


def _metrics_header(cfg: SimConfig, seeds: list[int], choice: ModeChoice) -> dict[str, Any]:
    seed: int | list[int] = seeds[0] if len(seeds) == 1 else seeds
    config = cfg.model_dump(mode="json")
    config["mode"] = choice.value
    config["modes"] = [m.value for m in choice.modes()]
    return artifact_meta(seed, config)


def _summarise(results: list[RunMetrics]) -> None:
    formatter.header("Simulation")
    formatter.table(
        ("seed", "mode", "strategy", "mean_us", "max_load_mb"),
        [(r.seed, r.mode.value, r.strategy.value, r.mean_us, r.max_pilot_load) for r in results],
    )


@app.command()
def simulate(
    config: Path | None = typer.Option(None, "--config", help="SimConfig JSON file"),  # noqa: B008
    scenario: Path | None = typer.Option(None, "--scenario", help="Scenario JSON to run on"),  # noqa: B008
    mode: ModeChoice | None = typer.Option(None, "--mode", help="d2d_only, dht_d2d or both"),  # noqa: B008
    strategy: Strategy | None = typer.Option(None, "--strategy", help="Pilot placement strategy"),  # noqa: B008
    params: int | None = typer.Option(None, "--params", help="Rated parameters (3, 6 or 9)"),
    new_file_frac: float | None = typer.Option(None, "--new-file-frac", help="Share of searches for new files"),
    iterations: int | None = typer.Option(None, "--iterations", help="Iterations per run"),
    seed: int | None = typer.Option(None, "--seed", help="Run seed"),
    seeds: str | None = typer.Option(None, "--seeds", help="Seed sweep, e.g. 0..19"),
    workers: int = typer.Option(1, "--workers", help="Processes for seed sweeps"),
    out: Path = typer.Option(Path(), "-o", "--out", help="Output directory"),  # noqa: B008
) -> None:
    """Run the file-sharing experiment and write metrics.csv."""
    with guarded():
        loaded: Scenario | None = None
        if scenario is not None:
            cfg = load_model(config, SimConfig) if config is not None else None
            loaded = scenario_from_file(load_model(scenario, ScenarioFile), cfg)
            base = loaded.config
        else:
            base = _base_config(config)

        choice = mode or ModeChoice(base.mode.value)
        cfg = base.with_overrides(
            mode=choice.modes()[-1],
            strategy=strategy,
            n_params=params,
            new_file_fraction=new_file_frac,
            iterations=iterations,
            seed=seed,
        )

        events: dict[Mode, list[dict[str, Any]]] = {m: [] for m in choice.modes()}
        if seeds is not None:
            if loaded is not None:
                msg = "--seeds draws a fresh scenario per seed and cannot be combined with --scenario"
                raise PilotMeshValidationError(msg)
            seed_list = parse_seeds(seeds)
            results = run_many(cfg, seed_list, choice.modes(), workers=workers)
        else:
            seed_list = [cfg.seed]

            def record(run_mode: Mode, iteration: int, result: LookupResult) -> None:
                events[run_mode].append(result.to_event(iteration))

            results = run_modes(cfg, choice.modes(), scenario=loaded, on_lookup=record)

        rows = [row for result in results for row in result.rows()]
        write_csv(out / "metrics.csv", _metrics_header(cfg, seed_list, choice), METRIC_COLUMNS, rows)
        if seeds is None:
            for run_mode, mode_events in events.items():
                write_jsonl(out / f"lookups-{run_mode.value}.jsonl", mode_events)

    _summarise(results)
    formatter.success(f"Metrics written to {out / 'metrics.csv'}")


def _read_ratings(report: Path | None, ratings: str | None) -> list[int]:
    if ratings is not None:
        try:
            return [int(r) for r in ratings.split(",") if r.strip()]
        except ValueError as e:
            msg = f"Cannot parse ratings '{ratings}'"
            raise PilotMeshValidationError(msg) from e
    if report is None:
        msg = "Pass a report file or --ratings"
        raise PilotMeshValidationError(msg)
    data = decode_json(report.read_bytes(), report.name)
    if isinstance(data, list):
        data = {"params": [{"name": f"param_{i}", "rating": r} for i, r in enumerate(data, start=1)]}
    return list(validate_model(data, SatisfactionReport, report.name).ratings)


@app.command(name="qoe-eval")
def qoe_eval(
    report: Path | None = typer.Argument(None, help="Satisfaction report JSON"),  # noqa: B008
    ratings: str | None = typer.Option(None, "--ratings", help="Ratings in preference order, e.g. 2,-2,2"),
) -> None:
    """Harmonic-rank weighted overall satisfaction of one report."""
    with guarded():
        score = us_overall(_read_ratings(report, ratings))
    formatter.metric("us_overall", score)


@app.command(name="qoe-mc")
def qoe_mc(
    k: int = typer.Option(10_000, "--k", help="Parameters per report"),
    trials: int = typer.Option(1000, "--trials", help="Number of random reports"),
    seed: int = typer.Option(0, "--seed", help="Sampling seed"),
    probabilities: str | None = typer.Option(
        None,
        "--probabilities",
        help="Five comma-separated level probabilities, from -2 to 2",
    ),
    threshold: float = typer.Option(0.6, "--threshold", help="Bound reported for |us_overall|"),
    workers: int = typer.Option(1, "--workers", help="Processes"),
    out: Path | None = typer.Option(None, "-o", "--out", help="Write trial scores to this CSV"),  # noqa: B008
) -> None:
    """Monte Carlo of the overall score under random ratings."""
    with guarded():
        try:
            probs = [float(p) for p in probabilities.split(",")] if probabilities else None
        except ValueError as e:
            msg = f"Cannot parse probabilities '{probabilities}'"
            raise PilotMeshValidationError(msg) from e
        stats = random_harmonic_experiment(k, trials, seed, probs, workers=workers)
        if out is not None:
            header = artifact_meta(seed, {"k": k, "trials": trials, "probabilities": probs})
            rows = [{"trial": i, "us_overall": float(v)} for i, v in enumerate(stats.samples)]
            write_csv(out, header, ("trial", "us_overall"), rows)

    formatter.header("Random ratings")
    formatter.key_value("k", stats.k)
    formatter.key_value("Trials", stats.trials)
    formatter.metric("Mean", stats.mean)
    formatter.metric("Std", stats.std)
    formatter.metric(f"Share |us| < {threshold}", stats.fraction_below(threshold))
    logger.debug("Quantiles of |us_overall|: %s", orjson.dumps(stats.abs_quantiles, option=orjson.OPT_NON_STR_KEYS))
