"""
Meta-evaluation: which metric tracks the human ratings?
=======================================================

Simulates human quality ratings plus three candidate metrics of varying
fidelity, then bootstraps Kendall tau-b correlations (1000 resamples of 70)
and renders the comparison table.
"""

import numpy as np

from fusebench.metaeval import correlation_table, render_correlation_table

rng = np.random.default_rng(0)
ids = [f"inst-{k}" for k in range(120)]
quality = rng.normal(size=len(ids))

human = {
    "faithfulness": {i: q + rng.normal(scale=0.3) for i, q in zip(ids, quality)},
    "coverage": {i: q + rng.normal(scale=0.5) for i, q in zip(ids, quality)},
}
metrics = {
    "sharp-metric": {i: q + rng.normal(scale=0.2) for i, q in zip(ids, quality)},
    "noisy-metric": {i: q + rng.normal(scale=1.5) for i, q in zip(ids, quality)},
    "random-metric": {i: rng.normal() for i in ids},
}

table = correlation_table(metrics, human, n_boot=1000, sample_size=70, seed=7)
print(render_correlation_table(table))
