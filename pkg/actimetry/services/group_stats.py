"""Cohort statistics: Mann-Whitney U tests, Pearson correlations, group
summaries and IV-sweep correlation curves.
"""

from collections.abc import Iterable, Mapping, Sequence
from itertools import combinations

import numpy as np
import pandas as pd
import structlog
from scipy import stats

from actimetry.core.exceptions import (
    ActimetryError,
    DegenerateSeriesError,
    EmptyDataError,
    InvalidParameterError,
)
from actimetry.models.circadian import IvSweep
from actimetry.models.recording import DEMENTIA_GROUP, DEMENTIA_MEMBERS, GroupLabel
from actimetry.schemas.metrics import (
    METRIC_COLUMNS,
    CorrelationMatrix,
    GroupComparison,
    MetricRow,
    MetricSummary,
    MetricTable,
    UTestResult,
)

logger = structlog.get_logger(__name__)

ALL_GROUP = "all"
# Exact enumeration is used up to this many (a, b) pairs when there are no ties
EXACT_PAIR_LIMIT = 400
U_METHODS = ("auto", "exact", "normal_approx")
SWEEP_TARGETS = ("is_value", "alpha", "pov_harmonic")

_ALTERNATIVES = {"two-sided": "two-sided", "two_sided": "two-sided", "greater": "greater", "less": "less"}


# ========== Kernels ==========


def mann_whitney_u(
    a: Sequence[float],
    b: Sequence[float],
    alternative: str = "two-sided",
    method: str = "auto",
) -> UTestResult:
    """Mann-Whitney U for sample ``a`` against sample ``b``.

    U counts pairs with a > b, ties counting one half (midranks). Under
    ``method="auto"`` the p-value is exact when n1 * n2 <= 400 and there are
    no ties; otherwise the normal approximation with tie and continuity
    corrections is used. ``"exact"`` and ``"normal_approx"`` force one of them.

    Raises:
        EmptyDataError: If either sample is empty
        InvalidParameterError: On an unknown method, or ``"exact"`` with ties
    """
    if alternative not in _ALTERNATIVES:
        raise InvalidParameterError(f"alternative must be one of {sorted(set(_ALTERNATIVES.values()))}")
    alternative = _ALTERNATIVES[alternative]
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.size == 0 or y.size == 0:
        raise EmptyDataError("Mann-Whitney U needs two nonempty samples")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidParameterError("Mann-Whitney U samples must be finite")

    has_ties = np.unique(np.concatenate([x, y])).size < x.size + y.size
    if method == "auto":
        exact = x.size * y.size <= EXACT_PAIR_LIMIT and not has_ties
    elif method == "exact":
        if has_ties:
            raise InvalidParameterError("exact p-values need samples without ties")
        exact = True
    elif method == "normal_approx":
        exact = False
    else:
        raise InvalidParameterError(f"method must be one of {U_METHODS}")
    result = stats.mannwhitneyu(
        x,
        y,
        alternative=alternative,
        method="exact" if exact else "asymptotic",
        use_continuity=True,
    )
    # All values tied: the normal approximation has zero variance
    p_value = float(result.pvalue) if np.isfinite(result.pvalue) else 1.0
    return UTestResult(
        u_statistic=float(result.statistic),
        p_value=float(np.clip(p_value, 0.0, 1.0)),
        method="exact" if exact else "normal_approx",
        n1=int(x.size),
        n2=int(y.size),
        alternative=alternative,
    )


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation.

    Raises:
        InvalidParameterError: On unequal lengths or fewer than three points
        DegenerateSeriesError: If either input is constant
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise InvalidParameterError("pearson inputs must have equal length")
    if x.size < 3:
        raise InvalidParameterError(f"pearson needs at least 3 points, got {x.size}")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise DegenerateSeriesError("pearson input is constant")
    return float(np.clip(stats.pearsonr(x, y).statistic, -1.0, 1.0))


# ========== Group selection ==========


def group_members(group: str) -> tuple[str, ...] | None:
    """Labels pooled into ``group``; None selects every row."""
    if group == ALL_GROUP:
        return None
    if group == DEMENTIA_GROUP:
        return DEMENTIA_MEMBERS
    return (GroupLabel.normalize(group),)


def select_group(frame: pd.DataFrame, group: str) -> pd.DataFrame:
    members = group_members(group)
    return frame if members is None else frame[frame["group"].isin(members)]


def reporting_groups(groups: Iterable[str]) -> list[str]:
    """Present groups, plus the pooled dementia group when a member is present."""
    present = sorted(set(groups))
    if any(member in present for member in DEMENTIA_MEMBERS):
        present.append(DEMENTIA_GROUP)
    return present


# ========== Summaries ==========


def summarize(
    table: MetricTable,
    metrics: Sequence[str] = METRIC_COLUMNS,
) -> dict[str, dict[str, MetricSummary]]:
    """Mean, sample SD, min, max and median per group and metric.

    Groups include the pooled dementia group and ``all``. SD is None for
    a single value.
    """
    if not table.rows:
        raise EmptyDataError("cannot summarise an empty table")
    frame = table.to_frame()
    summary: dict[str, dict[str, MetricSummary]] = {}
    for group in [*reporting_groups(frame["group"]), ALL_GROUP]:
        subset = select_group(frame, group)
        per_metric: dict[str, MetricSummary] = {}
        for metric in metrics:
            values = subset[metric].dropna().to_numpy()
            if values.size == 0:
                continue
            per_metric[metric] = MetricSummary(
                n=int(values.size),
                mean=float(np.mean(values)),
                sd=float(np.std(values, ddof=1)) if values.size > 1 else None,
                min=float(np.min(values)),
                max=float(np.max(values)),
                median=float(np.median(values)),
            )
        summary[group] = per_metric
    return summary


# ========== Correlations ==========


def metric_correlations(
    table: MetricTable,
    metrics: Sequence[str] = ("is_value", "iv", "alpha", "pov_harmonic"),
    group: str = ALL_GROUP,
) -> CorrelationMatrix:
    """Pairwise Pearson correlations over the rows of ``group``.

    Rows missing any selected metric are dropped first.

    Raises:
        EmptyDataError: If fewer than three rows remain
    """
    unknown = [m for m in metrics if m not in METRIC_COLUMNS]
    if unknown:
        raise InvalidParameterError(f"unknown metric(s) {unknown}")
    frame = select_group(table.to_frame(), group)
    data = frame[list(metrics)].dropna()
    if len(data) < 3:
        raise EmptyDataError(f"group {group!r} has {len(data)} complete row(s); at least 3 are needed")

    size = len(metrics)
    values: list[list[float | None]] = [[1.0 if i == j else None for j in range(size)] for i in range(size)]
    for i, j in combinations(range(size), 2):
        try:
            r = pearson(data.iloc[:, i], data.iloc[:, j])
        except DegenerateSeriesError:
            logger.info("constant_metric_column", group=group, pair=(metrics[i], metrics[j]))
            continue
        values[i][j] = values[j][i] = r
    return CorrelationMatrix(labels=list(metrics), values=values)


# ========== Group tests ==========


def default_test_pairs(groups: Iterable[str]) -> list[tuple[str, str]]:
    """Every pair of present groups, plus pooled dementia versus without-dementia."""
    present = sorted(set(groups))
    pairs = list(combinations(present, 2))
    without = GroupLabel.WITHOUT_DEMENTIA.value
    if without in present and any(member in present for member in DEMENTIA_MEMBERS):
        pairs.append((DEMENTIA_GROUP, without))
    return pairs


def group_comparisons(
    table: MetricTable,
    pairs: Sequence[tuple[str, str]] | None = None,
    metrics: Sequence[str] = METRIC_COLUMNS,
    alternative: str = "two-sided",
) -> list[GroupComparison]:
    """Mann-Whitney U for every (pair, metric) with data on both sides."""
    frame = table.to_frame()
    pairs = default_test_pairs(frame["group"]) if pairs is None else pairs
    results: list[GroupComparison] = []
    for group_a, group_b in pairs:
        for metric in metrics:
            a = select_group(frame, group_a)[metric].dropna()
            b = select_group(frame, group_b)[metric].dropna()
            if a.empty or b.empty:
                continue
            results.append(
                GroupComparison(
                    metric=metric,
                    group_a=group_a,
                    group_b=group_b,
                    result=mann_whitney_u(a, b, alternative),
                )
            )
    return results


def day_night_comparisons(table: MetricTable, alternative: str = "two-sided") -> list[GroupComparison]:
    """Within each group, daytime against nighttime scaling exponents."""
    frame = table.to_frame()
    results: list[GroupComparison] = []
    for group in [*reporting_groups(frame["group"]), ALL_GROUP]:
        subset = select_group(frame, group)
        day = subset["alpha_day"].dropna()
        night = subset["alpha_night"].dropna()
        if day.empty or night.empty:
            continue
        results.append(
            GroupComparison(
                metric="alpha_day_vs_night",
                group_a=f"{group}:day",
                group_b=f"{group}:night",
                result=mann_whitney_u(day, night, alternative),
            )
        )
    return results


# ========== IV sweep ==========


def sweep_tables(table: MetricTable, sweeps: Mapping[str, IvSweep]) -> dict[int, MetricTable]:
    """One table per delta with the ``iv`` column replaced by IV(delta)."""
    deltas = sorted({int(d) for sweep in sweeps.values() for d in sweep.deltas})
    tables: dict[int, MetricTable] = {}
    for delta in deltas:
        rows: list[MetricRow] = []
        for row in table.rows:
            sweep = sweeps.get(row.subject_id)
            iv = sweep.value_at(delta) if sweep is not None else None
            rows.append(row.model_copy(update={"iv": iv if iv is not None and np.isfinite(iv) else None}))
        tables[delta] = MetricTable(rows=rows, config_hash=table.config_hash)
    return tables


def iv_sweep_correlations(
    tables: Mapping[int, MetricTable],
    targets: Sequence[str] = SWEEP_TARGETS,
    sample_interval: float | None = None,
) -> pd.DataFrame:
    """Pearson r between IV(delta) and each target metric, per group and overall.

    Points whose correlation cannot be computed are omitted.

    Returns:
        Frame with columns delta, interval_seconds, group, metric, r, n
    """
    records: list[dict] = []
    omitted = 0
    for delta in sorted(tables):
        frame = tables[delta].to_frame()
        for group in [*reporting_groups(frame["group"]), ALL_GROUP]:
            subset = select_group(frame, group)
            for target in targets:
                pair = subset[["iv", target]].dropna()
                try:
                    r = pearson(pair["iv"], pair[target])
                except ActimetryError:
                    omitted += 1
                    continue
                records.append(
                    {
                        "delta": delta,
                        "interval_seconds": delta * sample_interval if sample_interval else np.nan,
                        "group": group,
                        "metric": target,
                        "r": r,
                        "n": len(pair),
                    }
                )
    if omitted:
        logger.info("sweep_correlations_omitted", count=omitted)
    return pd.DataFrame.from_records(
        records, columns=["delta", "interval_seconds", "group", "metric", "r", "n"]
    )


def iv_sweep_group_curves(
    table: MetricTable,
    sweeps: Mapping[str, IvSweep],
    reference_group: str | None = None,
) -> pd.DataFrame:
    """Mean IV per group and delta, and each curve as a percentage of a reference group.

    Returns:
        Frame with columns delta, interval_seconds, group, mean_iv, n,
        percent_of_reference
    """
    if not sweeps:
        return pd.DataFrame(columns=["delta", "interval_seconds", "group", "mean_iv", "n", "percent_of_reference"])
    long = pd.concat(
        [
            sweep.to_frame().assign(subject_id=subject_id)
            for subject_id, sweep in sweeps.items()
        ],
        ignore_index=True,
    )
    groups = {row.subject_id: row.group for row in table.rows}
    long["group"] = long["subject_id"].map(groups)
    long = long.dropna(subset=["group"])

    curves = []
    for group in reporting_groups(long["group"]):
        subset = select_group(long, group)
        curve = subset.groupby(["delta", "interval_seconds"], as_index=False).agg(
            mean_iv=("iv", "mean"), n=("iv", "size")
        )
        curves.append(curve.assign(group=group))
    result = pd.concat(curves, ignore_index=True)

    reference = reference_group or (
        GroupLabel.NON_INTERVENTION.value
        if GroupLabel.NON_INTERVENTION.value in set(result["group"])
        else sorted(set(result["group"]))[0]
    )
    baseline = result[result["group"] == reference].set_index("delta")["mean_iv"]
    result["percent_of_reference"] = 100.0 * result["mean_iv"] / result["delta"].map(baseline)
    return result[["delta", "interval_seconds", "group", "mean_iv", "n", "percent_of_reference"]]
