import itertools
import math
import random

import numpy as np
import pytest

from fusebench.metaeval import (
    CorrelationMethod,
    LengthMismatch,
    MissingSeries,
    PairedSeries,
    TooShort,
    bootstrap_correlation,
    correlation_table,
    kendall_tau_b,
    render_correlation_table,
    spearman_rho,
)


# ---------------------------------------------------------------------------
# Brute-force oracles

def oracle_tau_b(x, y):
    """Explicit pair enumeration with tie bookkeeping."""
    c = d = tx = ty = 0
    for i, j in itertools.combinations(range(len(x)), 2):
        sx = (x[i] > x[j]) - (x[i] < x[j])
        sy = (y[i] > y[j]) - (y[i] < y[j])
        if sx == 0 and sy == 0:
            continue
        if sx == 0:
            tx += 1
        elif sy == 0:
            ty += 1
        elif sx == sy:
            c += 1
        else:
            d += 1
    denom = math.sqrt(c + d + tx) * math.sqrt(c + d + ty)
    return (c - d) / denom if denom else 0.0


def oracle_spearman(x, y):
    """Mid-ranks then textbook Pearson."""

    def ranks(v):
        out = [0.0] * len(v)
        for i, val in enumerate(v):
            less = sum(1 for w in v if w < val)
            equal = sum(1 for w in v if w == val)
            out[i] = less + (equal + 1) / 2
        return out

    rx, ry = ranks(x), ranks(y)
    mx, my = sum(rx) / len(rx), sum(ry) / len(ry)
    num = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    dx = math.sqrt(sum((a - mx) ** 2 for a in rx))
    dy = math.sqrt(sum((b - my) ** 2 for b in ry))
    return num / (dx * dy) if dx and dy else 0.0


class TestKendallTauB:
    def test_identity(self):
        assert kendall_tau_b([1, 2, 3, 4], [1, 2, 3, 4]) == pytest.approx(1.0)

    def test_reverse(self):
        assert kendall_tau_b([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_hand_example(self):
        assert kendall_tau_b([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(4 / 6)

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            kendall_tau_b([1, 2], [1, 2, 3])
        with pytest.raises(TooShort):
            kendall_tau_b([1], [1])

    def test_all_permutations_n_le_6(self):
        for n in range(2, 7):
            base = list(range(n))
            for perm in itertools.permutations(base):
                assert kendall_tau_b(base, perm) == pytest.approx(
                    oracle_tau_b(base, perm), abs=1e-9
                )

    def test_random_tied_vectors(self):
        rng = random.Random(5)
        for _ in range(200):
            n = rng.randint(2, 12)
            x = [rng.randint(1, 4) for _ in range(n)]
            y = [rng.randint(1, 4) for _ in range(n)]
            assert kendall_tau_b(x, y) == pytest.approx(oracle_tau_b(x, y), abs=1e-9)

    def test_monotone_transform_invariance(self):
        rng = random.Random(9)
        for _ in range(50):
            x = [rng.random() for _ in range(10)]
            y = [rng.random() for _ in range(10)]
            t = kendall_tau_b(x, y)
            assert kendall_tau_b([math.exp(v) for v in x], y) == pytest.approx(t)
            assert kendall_tau_b(x, [3 * v + 1 for v in y]) == pytest.approx(t)


class TestSpearman:
    def test_monotone(self):
        assert spearman_rho([1, 5, 9], [2, 3, 100]) == pytest.approx(1.0)

    def test_hand_example(self):
        assert spearman_rho([1, 2, 3], [3, 1, 2]) == pytest.approx(-0.5)

    def test_constant_convention(self):
        assert spearman_rho([1, 2, 3], [4, 4, 4]) == 0.0

    def test_all_permutations_n_le_6(self):
        for n in range(2, 7):
            base = list(range(n))
            for perm in itertools.permutations(base):
                assert spearman_rho(base, perm) == pytest.approx(
                    oracle_spearman(base, perm), abs=1e-9
                )

    def test_random_tied_vectors(self):
        rng = random.Random(6)
        for _ in range(200):
            n = rng.randint(2, 12)
            x = [rng.randint(1, 4) for _ in range(n)]
            y = [rng.randint(1, 4) for _ in range(n)]
            assert spearman_rho(x, y) == pytest.approx(oracle_spearman(x, y), abs=1e-9)


class TestBootstrap:
    def make_series(self, n=100, noise=0.1, seed=0):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=n)
        y = x + noise * rng.normal(size=n)
        return PairedSeries(tuple(x), tuple(y))

    def test_identity_series(self):
        x = tuple(float(i) for i in range(30))
        series = PairedSeries(x, x)
        result = bootstrap_correlation(series, seed=3)
        assert result.ci_low == result.ci_high == 1.0
        assert result.bootstrap_mean == 1.0
        assert result.point_estimate == 1.0

    def test_determinism(self):
        series = self.make_series()
        a = bootstrap_correlation(series, seed=11)
        b = bootstrap_correlation(series, seed=11)
        assert a == b
        c = bootstrap_correlation(series, seed=12)
        assert c != a

    def test_defaults(self):
        series = self.make_series()
        result = bootstrap_correlation(series)
        assert result.n_boot == 1000
        assert result.sample_size == 70
        assert result.ci_low <= result.bootstrap_mean <= result.ci_high

    def test_mean_near_point_estimate(self):
        series = self.make_series(noise=0.2, seed=4)
        result = bootstrap_correlation(series, seed=5)
        assert abs(result.bootstrap_mean - result.point_estimate) < 0.1

    def test_degenerate_resamples_skipped(self):
        # Heavily tied series: some resamples may be constant; they are
        # skipped and counted rather than contributing zeros.
        series = PairedSeries((1.0, 1.0, 1.0, 2.0), (1.0, 1.0, 1.0, 2.0))
        result = bootstrap_correlation(series, n_boot=200, sample_size=3, seed=8)
        assert result.skipped_degenerate > 0
        assert all(-1 <= v <= 1 for v in (result.ci_low, result.ci_high))

    def test_coverage_sanity(self):
        # point estimate inside the 95% CI for >= 45/50 seeds
        hits = 0
        for seed in range(50):
            series = self.make_series(noise=0.5, seed=seed)
            result = bootstrap_correlation(series, n_boot=200, sample_size=70, seed=seed)
            if result.ci_low <= result.point_estimate <= result.ci_high:
                hits += 1
        assert hits >= 45


class TestCorrelationTable:
    def test_perfect_metric_marked_best(self):
        human_f = {f"i{k}": float(v) for k, v in enumerate([3, 1, 4, 1, 5, 9, 2, 6])}
        human_c = {f"i{k}": float(v) for k, v in enumerate([2, 7, 1, 8, 2, 8, 1, 8])}
        metrics = {
            "metric_a": dict(human_f),  # identical to human faithfulness
            "metric_b": {k: -v for k, v in human_f.items()},
        }
        table = correlation_table(
            metrics, {"faithfulness": human_f, "coverage": human_c},
            n_boot=50, sample_size=8, seed=1,
        )
        row_a = next(r for r in table["rows"] if r["metric"] == "metric_a")
        assert row_a["faithfulness"]["point_estimate"] == pytest.approx(1.0)
        assert row_a["faithfulness"]["best"]
        text = render_correlation_table(table)
        assert "metric_a" in text and "faithfulness" in text

    def test_id_alignment(self):
        human = {"a": 1.0, "b": 2.0, "c": 3.0}
        shuffled = {"c": 3.0, "a": 1.0, "b": 2.0}
        t1 = correlation_table({"m": human}, {"faithfulness": human},
                               n_boot=20, sample_size=5, seed=2)
        t2 = correlation_table({"m": shuffled}, {"faithfulness": human},
                               n_boot=20, sample_size=5, seed=2)
        assert t1 == t2

    def test_missing_series(self):
        with pytest.raises(MissingSeries):
            correlation_table({}, {"faithfulness": {"a": 1.0, "b": 2.0}})
