"""fusebench: a benchmark workbench for highlight-guided multi-review fusion.

Subpackages:
  corpus      data types, tokenization, sentence splitting, validation
  dataset     instance assembly, statistics, encodings, coverage data
  metrics     lexical metrics, faithfulness/coverage scoring, agreement
  gateway     HTTP scorer client and deterministic mock
  metaeval    rank correlations and bootstrap confidence intervals
  annotation  crowdsourcing annotation service (journal store + HTTP API)
  leaderboard flat-file submission scoring and ranking
"""

from . import corpus, dataset, gateway, leaderboard, metaeval, metrics

__all__ = ["corpus", "dataset", "gateway", "leaderboard", "metaeval", "metrics"]
__version__ = "0.1.0"
