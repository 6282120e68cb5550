"""Statistical validation of metrics against human judgments: rank
correlations, bootstrap confidence intervals and correlation tables.

Defaults follow the meta-evaluation protocol: 1000 resamples of 70 instances
drawn with replacement, percentile 95% confidence intervals, tie-corrected
Kendall tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np


class MetaEvalError(ValueError):
    pass


class LengthMismatch(MetaEvalError):
    pass


class TooShort(MetaEvalError):
    pass


class MissingSeries(MetaEvalError):
    pass


class CorrelationMethod(str, Enum):
    KENDALL_TAU_B = "kendall_tau_b"
    SPEARMAN = "spearman"


def _check_pair(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} vs {len(y)}")
    if len(x) < 2:
        raise TooShort("need at least 2 observations")
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> float:
    """Tie-corrected Kendall rank correlation.

    tau_b = (C - D) / sqrt((C + D + Tx) (C + D + Ty)) where Tx counts pairs
    tied in x only, Ty pairs tied in y only. Returns 0 when either factor of
    the denominator is 0.
    """
    xa, ya = _check_pair(x, y)
    dx = np.sign(xa[:, None] - xa[None, :])
    dy = np.sign(ya[:, None] - ya[None, :])
    iu = np.triu_indices(len(xa), k=1)
    sx, sy = dx[iu], dy[iu]
    concordant = int(np.sum((sx * sy) > 0))
    discordant = int(np.sum((sx * sy) < 0))
    tx = int(np.sum((sx == 0) & (sy != 0)))
    ty = int(np.sum((sy == 0) & (sx != 0)))
    denom_x = concordant + discordant + tx
    denom_y = concordant + discordant + ty
    if denom_x == 0 or denom_y == 0:
        return 0.0
    # single sqrt over the integer product keeps tied-free perfect agreement
    # at exactly 1.0
    return (concordant - discordant) / math.sqrt(denom_x * denom_y)


def _midranks(v: np.ndarray) -> np.ndarray:
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=float)
    i = 0
    sorted_v = v[order]
    while i < len(v):
        j = i
        while j + 1 < len(v) and sorted_v[j + 1] == sorted_v[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of mid-ranks (average ranks for ties).
    Zero-variance series yield 0 by convention."""
    xa, ya = _check_pair(x, y)
    rx, ry = _midranks(xa), _midranks(ya)
    sx, sy = rx.std(), ry.std()
    if sx == 0 or sy == 0:
        return 0.0
    return float(np.mean((rx - rx.mean()) * (ry - ry.mean())) / (sx * sy))


_METHODS = {
    CorrelationMethod.KENDALL_TAU_B: kendall_tau_b,
    CorrelationMethod.SPEARMAN: spearman_rho,
}


@dataclass(frozen=True)
class PairedSeries:
    metric_values: tuple[float, ...]
    human_values: tuple[float, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.metric_values) != len(self.human_values):
            raise LengthMismatch(
                f"{len(self.metric_values)} vs {len(self.human_values)}"
            )
        if len(self.metric_values) < 2:
            raise TooShort("paired series needs at least 2 points")

    @classmethod
    def from_records(
        cls,
        metric: Mapping[str, float],
        human: Mapping[str, float],
    ) -> "PairedSeries":
        """Align two {instance_id: value} maps on their shared ids."""
        ids = sorted(set(metric) & set(human))
        if len(ids) < 2:
            raise MissingSeries("fewer than 2 shared instance ids")
        return cls(
            metric_values=tuple(metric[i] for i in ids),
            human_values=tuple(human[i] for i in ids),
            labels=tuple(ids),
        )


@dataclass(frozen=True)
class CorrelationResult:
    method: CorrelationMethod
    point_estimate: float
    bootstrap_mean: float
    ci_low: float
    ci_high: float
    n_boot: int
    sample_size: int
    skipped_degenerate: int = 0

    def as_dict(self) -> dict:
        return {
            "method": self.method.value,
            "point_estimate": self.point_estimate,
            "bootstrap_mean": self.bootstrap_mean,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "n_boot": self.n_boot,
            "sample_size": self.sample_size,
            "skipped_degenerate": self.skipped_degenerate,
        }


def bootstrap_correlation(
    series: PairedSeries,
    method: CorrelationMethod = CorrelationMethod.KENDALL_TAU_B,
    n_boot: int = 1000,
    sample_size: int = 70,
    seed: int = 0,
) -> CorrelationResult:
    """Bootstrap the correlation: n_boot seeded resamples of sample_size
    index draws with replacement; mean and empirical 2.5/97.5 percentile CI.

    Resamples where either drawn series has zero variance (or, for tau,
    degenerates to an undefined denominator) are skipped and counted.
    """
    if n_boot < 1:
        raise MetaEvalError("n_boot must be >= 1")
    corr = _METHODS[method]
    x = np.asarray(series.metric_values, dtype=float)
    y = np.asarray(series.human_values, dtype=float)
    point = corr(x, y)

    rng = np.random.default_rng(seed)
    estimates: list[float] = []
    skipped = 0
    for _ in range(n_boot):
        idx = rng.integers(0, len(x), size=sample_size)
        xs, ys = x[idx], y[idx]
        if np.all(xs == xs[0]) or np.all(ys == ys[0]):
            skipped += 1
            continue
        estimates.append(corr(xs, ys))
    if not estimates:
        raise MetaEvalError("all bootstrap resamples were degenerate")

    arr = np.asarray(estimates)
    return CorrelationResult(
        method=method,
        point_estimate=point,
        bootstrap_mean=float(arr.mean()),
        ci_low=float(np.percentile(arr, 2.5)),
        ci_high=float(np.percentile(arr, 97.5)),
        n_boot=n_boot,
        sample_size=sample_size,
        skipped_degenerate=skipped,
    )


AXES = ("faithfulness", "coverage")


def correlation_table(
    metric_scores: Mapping[str, Mapping[str, float]],
    human_scores: Mapping[str, Mapping[str, float]],
    method: CorrelationMethod = CorrelationMethod.KENDALL_TAU_B,
    n_boot: int = 1000,
    sample_size: int = 70,
    seed: int = 0,
) -> dict:
    """One row per metric, (tau, CI) columns per human axis; the best
    correlation per axis is marked.

    metric_scores: {metric_name: {instance_id: value}}
    human_scores:  {axis: {instance_id: value}}
    """
    if not metric_scores:
        raise MissingSeries("no metric series given")
    axes = [a for a in AXES if a in human_scores] or sorted(human_scores)
    if not axes:
        raise MissingSeries("no human axis series given")

    rows = []
    for name in sorted(metric_scores):
        row: dict = {"metric": name}
        for axis in axes:
            series = PairedSeries.from_records(metric_scores[name], human_scores[axis])
            result = bootstrap_correlation(
                series, method=method, n_boot=n_boot, sample_size=sample_size, seed=seed
            )
            row[axis] = result.as_dict()
        rows.append(row)

    best = {}
    for axis in axes:
        best[axis] = max(rows, key=lambda r: r[axis]["bootstrap_mean"])["metric"]
    for row in rows:
        for axis in axes:
            row[axis]["best"] = row["metric"] == best[axis]
    return {"method": method.value, "axes": axes, "rows": rows}


def render_correlation_table(table: dict) -> str:
    """Aligned plain-text rendering of a correlation_table result."""
    axes = table["axes"]
    header = f"{'Metric':<22}" + "".join(f"{a + ' tau':>18}{'CI':>16}" for a in axes)
    lines = [header, "-" * len(header)]
    for row in table["rows"]:
        cells = [f"{row['metric']:<22}"]
        for a in axes:
            c = row[a]
            mark = "*" if c["best"] else " "
            cells.append(f"{c['bootstrap_mean']:>17.4f}{mark}")
            cells.append(f"{c['ci_low']:>8.2f}-{c['ci_high']:<7.2f}")
        lines.append("".join(cells))
    lines.append("(* best per axis)")
    return "\n".join(lines)
