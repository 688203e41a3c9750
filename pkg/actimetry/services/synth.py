"""Synthetic ENMO recordings for fixtures and calibration runs.

Every recording is drawn from its own generator seeded by
(cohort seed, group index, recording index), so files do not depend on
the order they are written in. Series that dip below zero are shifted up
by their minimum; a constant shift changes none of the metrics.
"""

import json
from pathlib import Path

import numpy as np
import structlog
from pydantic import ValidationError
from scipy import signal

from actimetry.core.exceptions import RecipeError
from actimetry.models.series import SECONDS_PER_DAY, DayNightSchedule
from actimetry.schemas.recipe import CohortRecipe, GroupRecipe, NoiseModel
from actimetry.services.ingestion import write_recording

logger = structlog.get_logger(__name__)


# ========== Noise processes ==========


def white_noise(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return scale * rng.standard_normal(n)


def ar1_noise(n: int, rng: np.random.Generator, coefficient: float, scale: float = 1.0) -> np.ndarray:
    """Stationary AR(1): y_t = phi * y_{t-1} + e_t with innovation sd ``scale``."""
    if not -1 < coefficient < 1:
        raise RecipeError(f"AR(1) coefficient must lie in (-1, 1), got {coefficient}")
    innovations = scale * rng.standard_normal(n)
    initial = scale / np.sqrt(1.0 - coefficient**2) * rng.standard_normal()
    filtered, _ = signal.lfilter([1.0], [1.0, -coefficient], innovations, zi=[coefficient * initial])
    return filtered


def power_law_noise(n: int, rng: np.random.Generator, exponent: float = 1.0, scale: float = 1.0) -> np.ndarray:
    """Spectral synthesis of noise with power spectrum ~ 1 / f**exponent.

    Gaussian white noise is shaped in the frequency domain by
    f**(-exponent / 2), then normalised to zero mean and sd ``scale``.
    """
    if n < 2:
        raise RecipeError("power-law noise needs at least two samples")
    spectrum = np.fft.rfft(rng.standard_normal(n))
    frequencies = np.fft.rfftfreq(n)
    spectrum[1:] *= frequencies[1:] ** (-exponent / 2.0)
    spectrum[0] = 0.0
    shaped = np.fft.irfft(spectrum, n)
    return scale * (shaped - shaped.mean()) / shaped.std()


def random_walk(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    return np.cumsum(scale * rng.standard_normal(n))


def noise_series(
    model: NoiseModel,
    n: int,
    rng: np.random.Generator,
    scale: float,
    ar_coefficient: float = 0.0,
) -> np.ndarray:
    if model == "none":
        return np.zeros(n)
    if model == "iid":
        return white_noise(n, rng, scale)
    if model == "ar1":
        return ar1_noise(n, rng, ar_coefficient, scale)
    if model == "pink":
        return power_law_noise(n, rng, 1.0, scale)
    if model == "random_walk":
        return random_walk(n, rng, scale)
    raise RecipeError(f"unknown noise model {model!r}")


# ========== Waveforms ==========


def circadian_waveform(
    seconds: np.ndarray,
    shape: str,
    amplitude: float,
    acrophase_hours: float = 0.0,
) -> np.ndarray:
    """Zero-mean 24 h waveform peaking at ``acrophase_hours``."""
    phase = 2.0 * np.pi * (seconds / SECONDS_PER_DAY - acrophase_hours / 24.0)
    if shape == "sine":
        return amplitude * np.cos(phase)
    if shape == "square":
        return amplitude * np.where(np.cos(phase) >= 0, 1.0, -1.0)
    if shape == "none":
        return np.zeros_like(seconds, dtype=float)
    raise RecipeError(f"unknown waveform {shape!r}")


def synthesize_values(recipe: GroupRecipe, rng: np.random.Generator) -> np.ndarray:
    """One recording's nonnegative ENMO values."""
    n = recipe.n_samples
    elapsed = np.arange(n) * recipe.sample_interval
    start = recipe.start_time
    clock = np.mod(elapsed + start.hour * 3600 + start.minute * 60 + start.second, SECONDS_PER_DAY)

    amplitude = recipe.amplitude
    if recipe.amplitude_spread:
        amplitude *= rng.uniform(1.0 - recipe.amplitude_spread, 1.0 + recipe.amplitude_spread)

    values = recipe.baseline + circadian_waveform(clock, recipe.shape, amplitude, recipe.acrophase_hours)
    values = values + noise_series(recipe.noise, n, rng, recipe.noise_scale, recipe.ar_coefficient)

    if recipe.night_noise is not None:
        night = DayNightSchedule(recipe.night_start, recipe.night_end).is_night(clock)
        replacement = noise_series(recipe.night_noise, n, rng, recipe.night_noise_scale, recipe.ar_coefficient)
        values = np.where(night, recipe.baseline + replacement, values)

    low = float(values.min())
    return values - low if low < 0 else values


def recording_rng(seed: int, group_index: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, group_index, index])


def synthesize_cohort(recipe: CohortRecipe, directory: Path) -> list[Path]:
    """Write every recording of ``recipe`` into ``directory``.

    Files are named ``<group>_<index>.csv`` with a matching sidecar.
    """
    directory = Path(directory)
    written: list[Path] = []
    for group_index, group in enumerate(recipe.groups):
        for index in range(group.count):
            values = synthesize_values(group, recording_rng(recipe.seed, group_index, index))
            subject_id = f"{group.group}_{index + 1:03d}"
            written.append(
                write_recording(directory, subject_id, group.group, group.start_time, group.sample_interval, values)
            )
        logger.info("group_synthesized", group=group.group, count=group.count, samples=group.n_samples)
    return written


# ========== Recipes ==========


def preset_recipe(name: str, seed: int = 0) -> CohortRecipe:
    """Named recipes used by fixtures and calibration checks.

    ``control-vs-dementia`` pairs a strong rhythm with smooth noise that
    decorrelates over minutes against a weak rhythm with larger noise that
    decorrelates within about two minutes.
    """
    single = {
        "pure-sine": dict(shape="sine", amplitude=1.0, baseline=1.0),
        "square-wave": dict(shape="square", amplitude=1.0, baseline=1.0),
        "white-noise": dict(shape="none", noise="iid", noise_scale=1.0),
        "pink-noise": dict(shape="none", noise="pink", noise_scale=1.0),
        "random-walk": dict(shape="none", noise="random_walk", noise_scale=1.0),
        "day-night-splice": dict(shape="none", noise="pink", noise_scale=1.0, night_noise="iid"),
    }
    if name in single:
        return CohortRecipe(name=name, seed=seed, groups=[GroupRecipe(group=name.replace("-", "_"), **single[name])])
    if name == "control-vs-dementia":
        return CohortRecipe(
            name=name,
            seed=seed,
            groups=[
                GroupRecipe(
                    group="without_dementia",
                    count=15,
                    amplitude=1.0,
                    amplitude_spread=0.2,
                    noise="ar1",
                    ar_coefficient=0.995,
                    noise_scale=0.05,
                ),
                GroupRecipe(
                    group="non_intervention",
                    count=15,
                    amplitude=0.3,
                    amplitude_spread=0.2,
                    noise="ar1",
                    ar_coefficient=0.95,
                    noise_scale=0.22,
                ),
            ],
        )
    raise RecipeError(f"unknown preset {name!r}; choose from {sorted([*single, 'control-vs-dementia'])}")


PRESETS = (
    "pure-sine",
    "square-wave",
    "white-noise",
    "pink-noise",
    "random-walk",
    "day-night-splice",
    "control-vs-dementia",
)


def load_recipe(path: Path | str) -> CohortRecipe:
    """Read a JSON cohort recipe.

    Raises:
        RecipeError: If the file is unreadable or fails validation
    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return CohortRecipe.model_validate(payload)
    except (OSError, json.JSONDecodeError) as exc:
        raise RecipeError(f"cannot read recipe {path}: {exc}") from exc
    except ValidationError as exc:
        raise RecipeError(f"invalid recipe {path}: {exc.error_count()} error(s): {exc.errors()[0]['msg']}") from exc


def build_recipe(name: str, seed: int = 0, **overrides) -> CohortRecipe:
    """Preset with per-group field overrides (``days``, ``count``, ...)."""
    recipe = preset_recipe(name, seed)
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if not overrides:
        return recipe
    try:
        groups = [GroupRecipe.model_validate({**group.model_dump(), **overrides}) for group in recipe.groups]
    except ValidationError as exc:
        raise RecipeError(f"invalid recipe override: {exc.errors()[0]['msg']}") from exc
    return recipe.model_copy(update={"groups": groups})
