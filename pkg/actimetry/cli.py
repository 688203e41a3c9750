"""Command line entry point: ``actimetry run | synth | sweep | spectrum``.

Exit codes: 0 success, 1 some recordings failed, 2 fatal (bad
configuration, no recordings, nothing analysable).
"""

from collections.abc import Callable
from pathlib import Path
from typing import NoReturn

import click
import structlog

from actimetry import __version__
from actimetry.config import get_settings
from actimetry.core.exceptions import ActimetryError
from actimetry.core.logging import configure_logging
from actimetry.schemas.config import RunConfig, load_run_config
from actimetry.schemas.report import EXIT_FATAL, EXIT_OK
from actimetry.services.circadian import iv_sweep
from actimetry.services.core_series import exclude_missing_days
from actimetry.services.ingestion import load_recording
from actimetry.services.pipeline import SPECTRUM_MAX_HZ, run_pipeline
from actimetry.services.reports import write_cohort
from actimetry.services.spectral import periodogram
from actimetry.services.synth import PRESETS, build_recipe, load_recipe, synthesize_cohort

logger = structlog.get_logger(__name__)

# Flags mirroring RunConfig fields; None means "not given" so file values survive
_CONFIG_OPTIONS = [
    click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="key=value config file"),
    click.option("--output-dir", type=click.Path(file_okay=False, path_type=Path), help="Defaults to ACTIMETRY_OUTPUT_DIR"),
    click.option("--workers", type=click.IntRange(min=1), help="Recordings processed in parallel"),
    click.option("--iv-delta", type=click.IntRange(min=1), help="IV subsampling factor in samples"),
    click.option("--sweep-start", type=click.IntRange(min=1)),
    click.option("--sweep-stop", type=click.IntRange(min=1)),
    click.option("--sweep-step", type=click.IntRange(min=1)),
    click.option("--dfa-scale-start", type=float, help="First exponent i of S = 2**i"),
    click.option("--dfa-scale-stop", type=float),
    click.option("--dfa-scale-step", type=float),
    click.option("--dfa-profile-source", type=click.Choice(["partition", "full"])),
    click.option("--night-start", type=float, help="Clock hour the night starts"),
    click.option("--night-end", type=float, help="Clock hour the night ends"),
    click.option("--k-max", type=click.IntRange(min=1), help="Number of harmonic bands"),
    click.option("--band-low-period-s", type=float),
    click.option("--band-high-period-s", type=float),
    click.option("--pov-method", type=click.Choice(["fourier", "trapezoid"])),
    click.option("--zero-pad-factor", type=click.IntRange(min=1)),
    click.option("--profile-bin-width", type=click.IntRange(min=1), help="Daily profile bin width in seconds"),
    click.option("--reference-group", help="Group the sweep curves are expressed against"),
    click.option("--test-pair", "test_pairs", multiple=True, help="group_a:group_b, repeatable"),
    click.option("--alternative", type=click.Choice(["two-sided", "greater", "less"])),
]


def config_options(command: Callable) -> Callable:
    for option in reversed(_CONFIG_OPTIONS):
        command = option(command)
    return command


def resolve_config(inputs: tuple[Path, ...], config_path: Path | None, **flags) -> RunConfig:
    """Config file, then flags; the output directory falls back to settings."""
    if flags.get("test_pairs") == ():
        flags["test_pairs"] = None
    config = load_run_config(config_path, inputs=list(inputs) or None, **flags)
    settings = get_settings()
    updates = {}
    if config.output_dir is None:
        updates["output_dir"] = settings.OUTPUT_DIR
    if "workers" not in config.model_fields_set:
        updates["workers"] = settings.WORKERS
    return config.model_copy(update=updates) if updates else config


def _fail(message: str) -> NoReturn:
    click.echo(f"error: {message}", err=True)
    raise SystemExit(EXIT_FATAL)


@click.group()
@click.option("--debug", is_flag=True, help="Verbose logging")
@click.version_option(__version__, prog_name="actimetry")
def cli(debug: bool) -> None:
    settings = get_settings()
    configure_logging(debug or settings.DEBUG, settings.LOG_LEVEL)


@cli.command(help="Compute every metric for a set of recordings and write the cohort report")
@click.argument("inputs", nargs=-1, type=click.Path(exists=True, path_type=Path))
@config_options
def run(inputs: tuple[Path, ...], config_path: Path | None, **flags) -> None:
    try:
        config = resolve_config(inputs, config_path, **flags)
        if not config.inputs:
            _fail("no inputs given")
        result = run_pipeline(config)
    except ActimetryError as exc:
        _fail(str(exc))

    write_cohort(result, config.output_dir)
    report = result.report
    click.echo(
        f"{len(report.recordings)} recording(s) analysed, {len(report.failures)} failed; "
        f"report in {config.output_dir}"
    )
    for failure in report.failures:
        click.echo(f"  {failure.source}: {failure.error_type}: {failure.message}", err=True)
    raise SystemExit(report.exit_code)


@cli.command(help=f"Write a synthetic cohort; PRESET is one of {', '.join(PRESETS)}")
@click.argument("preset", required=False)
@click.option("--recipe", "recipe_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="JSON cohort recipe")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="key=value config file supplying the seed")
@click.option("--output-dir", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--seed", type=int, help="Overrides the config seed, and the seed of a --recipe file")
@click.option("--days", type=click.IntRange(min=1))
@click.option("--count", type=click.IntRange(min=1))
@click.option("--sample-interval", type=float)
def synth(
    preset: str | None,
    recipe_path: Path | None,
    config_path: Path | None,
    output_dir: Path,
    seed: int | None,
    days: int | None,
    count: int | None,
    sample_interval: float | None,
) -> None:
    if (preset is None) == (recipe_path is None):
        _fail("give exactly one of PRESET or --recipe")
    try:
        config = load_run_config(config_path, seed=seed)
        if recipe_path is not None:
            recipe = load_recipe(recipe_path)
            if seed is not None:
                recipe = recipe.model_copy(update={"seed": seed})
        else:
            recipe = build_recipe(preset, config.seed, days=days, count=count, sample_interval=sample_interval)
        paths = synthesize_cohort(recipe, output_dir)
    except ActimetryError as exc:
        _fail(str(exc))
    click.echo(f"wrote {len(paths)} recording(s) to {output_dir} (seed {recipe.seed})")
    raise SystemExit(EXIT_OK)


@cli.command(help="IV over a range of subsampling factors for one recording")
@click.argument("recording", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--sweep-start", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--sweep-stop", type=click.IntRange(min=1), default=720, show_default=True)
@click.option("--sweep-step", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), help="CSV path; stdout when omitted")
def sweep(recording: Path, sweep_start: int, sweep_stop: int, sweep_step: int, output: Path | None) -> None:
    try:
        series = exclude_missing_days(load_recording(recording)).to_series()
        result = iv_sweep(series, range(sweep_start, sweep_stop + 1, sweep_step), workers=get_settings().WORKERS)
    except ActimetryError as exc:
        _fail(str(exc))
    _emit(result.to_frame(), output)
    for delta, reason in sorted(result.omitted.items()):
        click.echo(f"delta={delta} omitted: {reason}", err=True)
    raise SystemExit(EXIT_OK)


@cli.command(help="Dump the periodogram of one recording")
@click.argument("recording", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--zero-pad-factor", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--f-max", type=float, help="Upper frequency in Hz; defaults to the fifth harmonic")
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), help="CSV path; stdout when omitted")
def spectrum(recording: Path, zero_pad_factor: int, f_max: float | None, output: Path | None) -> None:
    try:
        series = exclude_missing_days(load_recording(recording)).to_series()
        frame = periodogram(series, zero_pad_factor).to_frame(0.0, SPECTRUM_MAX_HZ if f_max is None else f_max)
    except ActimetryError as exc:
        _fail(str(exc))
    _emit(frame, output)
    raise SystemExit(EXIT_OK)


def _emit(frame, output: Path | None) -> None:
    if output is None:
        click.echo(frame.to_csv(index=False, float_format="%.12g", lineterminator="\n"), nl=False)
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output, index=False, float_format="%.12g", lineterminator="\n")
    click.echo(f"wrote {output}", err=True)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
