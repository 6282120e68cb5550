"""Flat-file leaderboard: scores benchmark submissions over the test split
and ranks them by F-1.

Persistence reuses the append-only journal format of the annotation store.
Scores are kept at full precision; rounding happens only at render time so
ranking never depends on rounding.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .annotation.store import Journal
from .corpus import FiCInstance, Split, SystemOutput
from .gateway import Scorer
from .metrics import CoverageMode, evaluate_output, round_score


class SubmissionError(ValueError):
    pass


class IncompleteCoverageOfInstances(SubmissionError):
    pass


class DuplicateSystemId(SubmissionError):
    pass


@dataclass(frozen=True)
class Submission:
    system_id: str
    submitted_at: float
    faithfulness: float
    coverage: float
    f1: float
    n_instances: int

    def as_dict(self) -> dict:
        return {
            "system_id": self.system_id,
            "submitted_at": self.submitted_at,
            "faithfulness": self.faithfulness,
            "coverage": self.coverage,
            "f1": self.f1,
            "n_instances": self.n_instances,
        }


@dataclass(frozen=True)
class LeaderboardTable:
    rows: tuple[Submission, ...]

    def as_dict(self) -> dict:
        return {
            "rows": [
                {
                    **r.as_dict(),
                    "faithfulness": round_score(r.faithfulness),
                    "coverage": round_score(r.coverage),
                    "f1": round_score(r.f1),
                }
                for r in self.rows
            ]
        }

    def as_text(self) -> str:
        header = f"{'Rank':<6}{'System':<24}{'Faithfulness':>14}{'Coverage':>10}{'F-1':>8}"
        lines = [header, "-" * len(header)]
        for i, r in enumerate(self.rows, start=1):
            lines.append(
                f"{i:<6}{r.system_id:<24}{round_score(r.faithfulness):>14.1f}"
                f"{round_score(r.coverage):>10.1f}{round_score(r.f1):>8.1f}"
            )
        return "\n".join(lines)


class Leaderboard:
    def __init__(
        self,
        data_dir: str | Path,
        instances: Sequence[FiCInstance],
        gateway: Scorer,
        coverage_mode: CoverageMode = CoverageMode.TRAINED,
        split: Split | None = Split.TEST,
    ):
        self.journal = Journal(Path(data_dir) / "leaderboard.ndjson")
        self.instances = {
            i.instance_id: i
            for i in instances
            if split is None or i.split is split
        }
        self.gateway = gateway
        self.coverage_mode = coverage_mode
        self.submissions: dict[str, Submission] = {}
        for event in self.journal.replay():
            if event["event"] == "submission":
                s = Submission(**event["submission"])
                self.submissions[s.system_id] = s

    def submit(
        self, system_id: str, outputs: Sequence[SystemOutput], replace: bool = False
    ) -> Submission:
        """Score a complete submission and append it to the journal.

        Atomic: every instance is scored before anything is persisted, so a
        failed scoring run leaves the journal unchanged."""
        if system_id in self.submissions and not replace:
            raise DuplicateSystemId(system_id)
        by_instance = {o.instance_id: o for o in outputs}
        missing = sorted(set(self.instances) - set(by_instance))
        if missing:
            raise IncompleteCoverageOfInstances(f"missing outputs for {missing}")
        extra = sorted(set(by_instance) - set(self.instances))
        if extra:
            raise SubmissionError(f"outputs for unknown instances {extra}")
        if not self.instances:
            raise SubmissionError("leaderboard has no evaluable instances")

        reports = [
            evaluate_output(
                self.instances[iid], by_instance[iid], self.gateway, self.coverage_mode
            )
            for iid in sorted(self.instances)
        ]
        n = len(reports)
        faith = sum(r.faithfulness for r in reports) / n
        cov = sum(r.coverage for r in reports) / n
        f1 = sum(r.f1 for r in reports) / n
        submission = Submission(
            system_id=system_id,
            submitted_at=time.time(),
            faithfulness=faith,
            coverage=cov,
            f1=f1,
            n_instances=n,
        )
        self.journal.append({"event": "submission", "submission": submission.as_dict()})
        self.submissions[system_id] = submission
        return submission

    def submit_from_records(
        self, system_id: str, outputs: Sequence[Mapping], replace: bool = False
    ) -> Submission:
        """Accepts the wire form: a list of {instance_id, passage} objects."""
        built = [
            SystemOutput.build(o["instance_id"], system_id, o["passage"])
            for o in outputs
        ]
        return self.submit(system_id, built, replace=replace)

    def render(self) -> LeaderboardTable:
        """Rows sorted by descending F-1; ties broken by faithfulness then
        system id."""
        rows = sorted(
            self.submissions.values(),
            key=lambda s: (-s.f1, -s.faithfulness, s.system_id),
        )
        return LeaderboardTable(rows=tuple(rows))
