"""
Scoring a fusion system end to end
==================================

Builds one tiny instance, scores a candidate passage with the deterministic
mock scorer, and prints the per-instance report plus the leaderboard that
would result from three submissions.
"""

import tempfile

from fusebench.corpus import (
    Alignment,
    FiCInstance,
    Highlight,
    Review,
    ReviewSet,
    Span,
    Split,
    Summary,
    SystemOutput,
)
from fusebench.gateway import MockScorer
from fusebench.leaderboard import Leaderboard
from fusebench.metrics import evaluate_output, render_report_table

# One review set, one fused summary, two alignments.
reviews = (
    Review.build("r0", "The pool was great and clean. Staff were friendly."),
    Review.build("r1", "Our room was cleaned daily. The pool area felt crowded."),
)
instance = FiCInstance.build(
    instance_id="demo-1",
    review_set=ReviewSet(id="set-1", reviews=reviews),
    fused_text=Summary.build("sum-1", "The pool was great. The rooms were clean."),
    alignments=(
        Alignment(0, (Span(0, 18),), Highlight("r0", (Span(0, 28),)), "w1"),
        Alignment(1, (Span(20, 41),), Highlight("r1", (Span(0, 27),)), "w1"),
    ),
    split=Split.TEST,
)

# A candidate output, scored against the highlights. The mock scorer returns
# a fixed probability, so the lexical metrics are the interesting part here.
output = SystemOutput.build("demo-1", "demo-system", "The pool was great and clean.")
report = evaluate_output(instance, output, MockScorer(default=0.85))
print(render_report_table([report]))
print(f"\nF-1 = {report.f1:.1f} (faithfulness {report.faithfulness:.1f}, "
      f"coverage {report.coverage:.1f})")

# Three systems on a throwaway leaderboard: better scorer probability wins.
with tempfile.TemporaryDirectory() as data_dir:
    for name, prob in [("strong", 0.9), ("middle", 0.6), ("weak", 0.3)]:
        board = Leaderboard(data_dir, [instance], MockScorer(default=prob))
        board.submit(name, [SystemOutput.build("demo-1", name, output.passage)])
    board = Leaderboard(data_dir, [instance], MockScorer())
    print()
    print(board.render().as_text())
