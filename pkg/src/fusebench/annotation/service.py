"""Domain logic for the controlled-crowdsourcing annotation workflow:
sessions, alignment capture with emboldening support, qualification rounds,
review sampling and Likert judgment collection.

State is rebuilt from an append-only event journal at startup; all writes to
a single session are serialized through a per-service lock.
"""

from __future__ import annotations

import random
import threading
import time
import uuid
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from ..corpus import Alignment, Highlight, ReviewSet, Span, Summary
from .store import Journal


class AnnotationError(Exception):
    pass


class UnqualifiedWorker(AnnotationError):
    pass


class PairAlreadyAssigned(AnnotationError):
    pass


class UnknownPair(AnnotationError):
    pass


class UnknownWorker(AnnotationError):
    pass


class UnknownSession(AnnotationError):
    pass


class UnknownOutput(AnnotationError):
    pass


class SessionClosed(AnnotationError):
    pass


class SpanOutOfBounds(AnnotationError):
    pass


class WrongFocusedSentence(AnnotationError):
    pass


class IndexOutOfRange(AnnotationError):
    pass


class TerminalState(AnnotationError):
    pass


class ScoreOutOfRange(AnnotationError):
    pass


class NoJudgments(AnnotationError):
    pass


class SessionStatus(str, Enum):
    OPEN = "Open"
    SUBMITTED = "Submitted"
    REVIEWED = "Reviewed"


class Stage(str, Enum):
    OPEN_ROUND = "OpenRound"
    CLOSED_ROUND = "ClosedRound"
    QUALIFIED = "Qualified"
    REJECTED = "Rejected"


DEFAULT_OPEN_ROUNDS = 3
DEFAULT_CLOSED_ROUNDS = 3


@dataclass(frozen=True)
class QualificationState:
    stage: Stage = Stage.OPEN_ROUND
    round: int = 1
    tutorial_completed: bool = False
    awaiting_tutorial: bool = False  # passed all open rounds, tutorial pending

    def as_dict(self) -> dict:
        return {
            "stage": self.stage.value,
            "round": self.round,
            "tutorial_completed": self.tutorial_completed,
            "awaiting_tutorial": self.awaiting_tutorial,
        }


@dataclass(frozen=True)
class FeedbackRecord:
    round: str
    reviewer_note: str
    passed: bool
    timestamp: float


@dataclass
class WorkerProfile:
    worker_id: str
    qualification: QualificationState = field(default_factory=QualificationState)
    feedback: list[FeedbackRecord] = field(default_factory=list)


JUDGMENT_AXES = {
    "Faithfulness": (1, 7),
    "Coverage": (1, 7),
    "Coherence": (1, 5),
    "Redundancy": (1, 5),
}


@dataclass(frozen=True)
class JudgmentRecord:
    judge_id: str
    instance_id: str
    system_id: str
    axis: str
    score: int


@dataclass
class AnnotationSession:
    session_id: str
    worker_id: str
    review_set_id: str
    summary_id: str
    current_review_index: int = 0
    focused_sentence_index: int = 0
    saved_alignments: list[Alignment] = field(default_factory=list)
    status: SessionStatus = SessionStatus.OPEN
    ready_to_submit: bool = False

    def as_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "worker_id": self.worker_id,
            "review_set_id": self.review_set_id,
            "summary_id": self.summary_id,
            "current_review_index": self.current_review_index,
            "focused_sentence_index": self.focused_sentence_index,
            "status": self.status.value,
            "ready_to_submit": self.ready_to_submit,
            "saved_alignments": [
                {
                    "summary_sentence_index": a.summary_sentence_index,
                    "summary_spans": [s.to_pair() for s in a.summary_spans],
                    "review_id": a.highlight.review_id,
                    "highlight_spans": [s.to_pair() for s in a.highlight.spans],
                    "aspect_label": a.aspect_label,
                    "annotator_id": a.annotator_id,
                }
                for a in self.saved_alignments
            ],
        }


class AdvanceStep(str, Enum):
    NEXT_ASPECT = "NextAspect"
    NEXT_SENTENCE = "NextSentence"
    NEXT_REVIEW = "NextReview"


def _alignment_from_dict(d: dict) -> Alignment:
    return Alignment(
        summary_sentence_index=d["summary_sentence_index"],
        summary_spans=tuple(Span(s, e) for s, e in d["summary_spans"]),
        highlight=Highlight(
            review_id=d["review_id"],
            spans=tuple(Span(s, e) for s, e in d["highlight_spans"]),
        ),
        aspect_label=d.get("aspect_label"),
        annotator_id=d["annotator_id"],
    )


class AnnotationService:
    """In-memory state over an event journal. Thread-safe: a single lock
    serializes all mutations (reads take it briefly to snapshot)."""

    def __init__(
        self,
        data_dir: str | Path,
        closed_rounds: int = DEFAULT_CLOSED_ROUNDS,
        durable: bool = True,
    ):
        self.data_dir = Path(data_dir)
        self.closed_rounds = closed_rounds
        self.journal = Journal(self.data_dir / "annotation.ndjson", durable=durable)
        self._lock = threading.RLock()
        self.pairs: dict[tuple[str, str], tuple[ReviewSet, Summary]] = {}
        self.sessions: dict[str, AnnotationSession] = {}
        self.workers: dict[str, WorkerProfile] = {}
        self.assigned: dict[tuple[str, str], str] = {}  # pair -> worker
        self.outputs: set[tuple[str, str]] = set()  # known (instance, system) refs
        self.judgments: dict[tuple[str, str, str, str], JudgmentRecord] = {}
        self._replay()

    # -- corpus registration -------------------------------------------------

    def register_pair(self, review_set: ReviewSet, summary: Summary) -> None:
        with self._lock:
            self.pairs[(review_set.id, summary.id)] = (review_set, summary)

    def register_output(self, instance_id: str, system_id: str) -> None:
        with self._lock:
            self.outputs.add((instance_id, system_id))

    # -- journal replay ------------------------------------------------------

    def _replay(self) -> None:
        for event in self.journal.replay():
            self._apply(event)

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "session_started":
            s = AnnotationSession(
                session_id=event["session_id"],
                worker_id=event["worker_id"],
                review_set_id=event["review_set_id"],
                summary_id=event["summary_id"],
            )
            self.sessions[s.session_id] = s
            self.assigned[(s.review_set_id, s.summary_id)] = s.worker_id
        elif kind == "alignment_saved":
            session = self.sessions.get(event["session_id"])
            if session is not None:
                session.saved_alignments.append(_alignment_from_dict(event["alignment"]))
        elif kind == "advanced":
            session = self.sessions.get(event["session_id"])
            if session is not None:
                session.current_review_index = event["review_index"]
                session.focused_sentence_index = event["sentence_index"]
                session.ready_to_submit = event.get("ready_to_submit", False)
        elif kind == "session_submitted":
            session = self.sessions.get(event["session_id"])
            if session is not None:
                session.status = SessionStatus.SUBMITTED
        elif kind == "worker_created":
            self.workers[event["worker_id"]] = WorkerProfile(worker_id=event["worker_id"])
        elif kind == "qualification":
            profile = self.workers.get(event["worker_id"])
            if profile is not None:
                q = event["state"]
                profile.qualification = QualificationState(
                    stage=Stage(q["stage"]),
                    round=q["round"],
                    tutorial_completed=q["tutorial_completed"],
                    awaiting_tutorial=q["awaiting_tutorial"],
                )
        elif kind == "feedback":
            profile = self.workers.get(event["worker_id"])
            if profile is not None:
                profile.feedback.append(
                    FeedbackRecord(
                        round=event["round"],
                        reviewer_note=event["note"],
                        passed=event["passed"],
                        timestamp=event["timestamp"],
                    )
                )
        elif kind == "judgment":
            r = JudgmentRecord(
                judge_id=event["judge_id"],
                instance_id=event["instance_id"],
                system_id=event["system_id"],
                axis=event["axis"],
                score=event["score"],
            )
            self.judgments[(r.judge_id, r.instance_id, r.system_id, r.axis)] = r
            self.outputs.add((r.instance_id, r.system_id))

    # -- workers and qualification -------------------------------------------

    def create_worker(self, worker_id: str) -> WorkerProfile:
        with self._lock:
            if worker_id not in self.workers:
                self.journal.append({"event": "worker_created", "worker_id": worker_id})
                self._apply({"event": "worker_created", "worker_id": worker_id})
            return self.workers[worker_id]

    def complete_tutorial(self, worker_id: str) -> QualificationState:
        with self._lock:
            profile = self._worker(worker_id)
            q = profile.qualification
            new = replace(q, tutorial_completed=True)
            if q.awaiting_tutorial:
                new = QualificationState(
                    stage=Stage.CLOSED_ROUND, round=1, tutorial_completed=True
                )
            self._record_qualification(worker_id, new)
            return new

    def advance_qualification(
        self, worker_id: str, passed: bool, reviewer_note: str = ""
    ) -> QualificationState:
        """Move a worker through the staged qualification pipeline.

        Open rounds 1..3 (pass each to proceed), then the tutorial gate,
        then closed rounds; the final closed-round pass qualifies. Any fail
        is terminal."""
        with self._lock:
            profile = self._worker(worker_id)
            q = profile.qualification
            if q.stage in (Stage.QUALIFIED, Stage.REJECTED):
                raise TerminalState(f"worker {worker_id} is {q.stage.value}")

            self.journal.append(
                {
                    "event": "feedback",
                    "worker_id": worker_id,
                    "round": f"{q.stage.value}({q.round})",
                    "note": reviewer_note,
                    "passed": passed,
                    "timestamp": time.time(),
                }
            )
            profile.feedback.append(
                FeedbackRecord(
                    round=f"{q.stage.value}({q.round})",
                    reviewer_note=reviewer_note,
                    passed=passed,
                    timestamp=time.time(),
                )
            )

            if not passed:
                new = replace(q, stage=Stage.REJECTED, awaiting_tutorial=False)
            elif q.stage is Stage.OPEN_ROUND:
                if q.awaiting_tutorial:
                    raise TerminalState("tutorial pending; complete it before advancing")
                if q.round < DEFAULT_OPEN_ROUNDS:
                    new = replace(q, round=q.round + 1)
                elif q.tutorial_completed:
                    new = QualificationState(
                        stage=Stage.CLOSED_ROUND, round=1, tutorial_completed=True
                    )
                else:
                    new = replace(q, awaiting_tutorial=True)
            else:  # closed round
                if q.round < self.closed_rounds:
                    new = replace(q, round=q.round + 1)
                else:
                    new = replace(q, stage=Stage.QUALIFIED)
            self._record_qualification(worker_id, new)
            return new

    def _record_qualification(self, worker_id: str, state: QualificationState) -> None:
        self.journal.append(
            {"event": "qualification", "worker_id": worker_id, "state": state.as_dict()}
        )
        self.workers[worker_id].qualification = state

    def _worker(self, worker_id: str) -> WorkerProfile:
        profile = self.workers.get(worker_id)
        if profile is None:
            raise UnknownWorker(worker_id)
        return profile

    # -- sessions --------------------------------------------------------------

    def start_session(
        self, worker_id: str, review_set_id: str, summary_id: str,
        training: bool = False,
    ) -> AnnotationSession:
        with self._lock:
            profile = self._worker(worker_id)
            stage = profile.qualification.stage
            if not training and stage is not Stage.QUALIFIED:
                raise UnqualifiedWorker(f"{worker_id} is in {stage.value}")
            if training and stage in (Stage.QUALIFIED, Stage.REJECTED):
                raise UnqualifiedWorker(f"{worker_id} is not in a qualification round")
            pair = (review_set_id, summary_id)
            if pair not in self.pairs:
                raise UnknownPair(f"({review_set_id}, {summary_id})")
            holder = self.assigned.get(pair)
            if holder is not None and holder != worker_id:
                raise PairAlreadyAssigned(f"assigned to {holder}")
            if holder == worker_id:
                for s in self.sessions.values():
                    if (s.review_set_id, s.summary_id) == pair and s.worker_id == worker_id:
                        return s
            event = {
                "event": "session_started",
                "session_id": uuid.uuid4().hex,
                "worker_id": worker_id,
                "review_set_id": review_set_id,
                "summary_id": summary_id,
            }
            self.journal.append(event)
            self._apply(event)
            return self.sessions[event["session_id"]]

    def get_session(self, session_id: str) -> AnnotationSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def _pair_of(self, session: AnnotationSession) -> tuple[ReviewSet, Summary]:
        return self.pairs[(session.review_set_id, session.summary_id)]

    def embolden(self, session_id: str, review_index: int) -> list[int]:
        """Indices of review content-word tokens whose stem matches any
        content-word stem in the focused summary sentence."""
        session = self.get_session(session_id)
        review_set, summary = self._pair_of(session)
        if not (0 <= review_index < len(review_set.reviews)):
            raise IndexOutOfRange(f"review {review_index}")
        if not (0 <= session.focused_sentence_index < len(summary.sentences)):
            raise IndexOutOfRange(f"sentence {session.focused_sentence_index}")
        sentence = summary.sentences[session.focused_sentence_index]
        summary_stems = {
            t.stem
            for t in summary.tokens
            if t.is_content_word and t.span.start >= sentence.start and t.span.end <= sentence.end
        }
        review = review_set.reviews[review_index]
        return [
            i
            for i, t in enumerate(review.tokens)
            if t.is_content_word and t.stem in summary_stems
        ]

    def save_alignment(self, session_id: str, alignment: Alignment) -> str:
        """Append an alignment. Returns "saved" or, for an identical
        re-submission, "duplicate" with no state change."""
        with self._lock:
            session = self.get_session(session_id)
            if session.status is not SessionStatus.OPEN:
                raise SessionClosed(session_id)
            review_set, summary = self._pair_of(session)

            if alignment.summary_sentence_index != session.focused_sentence_index:
                raise WrongFocusedSentence(
                    f"focused {session.focused_sentence_index}, "
                    f"got {alignment.summary_sentence_index}"
                )
            if not (0 <= alignment.summary_sentence_index < len(summary.sentences)):
                raise SpanOutOfBounds("sentence index outside summary")
            sentence = summary.sentences[alignment.summary_sentence_index]
            for s in alignment.summary_spans:
                if s.start < sentence.start or s.end > sentence.end:
                    raise SpanOutOfBounds(f"summary span {s} outside focused sentence")
            try:
                review = review_set.review_by_id(alignment.highlight.review_id)
            except KeyError:
                raise SpanOutOfBounds(f"unknown review {alignment.highlight.review_id!r}")
            if not alignment.highlight.spans:
                raise SpanOutOfBounds("highlight has no spans")
            prev = None
            for s in alignment.highlight.spans:
                if s.end > len(review.text):
                    raise SpanOutOfBounds(f"highlight span {s} beyond review end")
                if prev is not None and s.start < prev.end:
                    raise SpanOutOfBounds("highlight spans overlap or are unsorted")
                prev = s

            if alignment in session.saved_alignments:
                return "duplicate"

            event = {
                "event": "alignment_saved",
                "session_id": session_id,
                "alignment": {
                    "summary_sentence_index": alignment.summary_sentence_index,
                    "summary_spans": [s.to_pair() for s in alignment.summary_spans],
                    "review_id": alignment.highlight.review_id,
                    "highlight_spans": [s.to_pair() for s in alignment.highlight.spans],
                    "aspect_label": alignment.aspect_label,
                    "annotator_id": alignment.annotator_id,
                },
            }
            self.journal.append(event)
            session.saved_alignments.append(alignment)
            return "saved"

    def advance(self, session_id: str, step: AdvanceStep) -> AnnotationSession:
        """NextSentence saturates at the last sentence; NextReview moves to
        the next review and resets the sentence; past-the-end NextReview
        flags the session ready to submit. NextAspect leaves indices alone."""
        with self._lock:
            session = self.get_session(session_id)
            if session.status is not SessionStatus.OPEN:
                raise SessionClosed(session_id)
            review_set, summary = self._pair_of(session)
            review_idx = session.current_review_index
            sent_idx = session.focused_sentence_index
            ready = session.ready_to_submit
            if step is AdvanceStep.NEXT_SENTENCE:
                sent_idx = min(sent_idx + 1, len(summary.sentences) - 1)
            elif step is AdvanceStep.NEXT_REVIEW:
                if review_idx + 1 < len(review_set.reviews):
                    review_idx += 1
                    sent_idx = 0
                else:
                    ready = True
            event = {
                "event": "advanced",
                "session_id": session_id,
                "review_index": review_idx,
                "sentence_index": sent_idx,
                "ready_to_submit": ready,
            }
            self.journal.append(event)
            self._apply(event)
            return session

    def submit_session(self, session_id: str) -> dict:
        """Close the session; the receipt lists summary sentences with no
        alignment so a reviewer can check them (unaligned sentences are
        permitted)."""
        with self._lock:
            session = self.get_session(session_id)
            if session.status is not SessionStatus.OPEN:
                raise SessionClosed(session_id)
            _, summary = self._pair_of(session)
            aligned = {a.summary_sentence_index for a in session.saved_alignments}
            unaligned = [
                i for i in range(len(summary.sentences)) if i not in aligned
            ]
            event = {"event": "session_submitted", "session_id": session_id}
            self.journal.append(event)
            self._apply(event)
            return {
                "session_id": session_id,
                "status": SessionStatus.SUBMITTED.value,
                "unaligned_sentences": unaligned,
            }

    def sample_for_review(self, rate: float, seed: int) -> list[AnnotationSession]:
        """Deterministic pseudo-random subset of submitted sessions of size
        round(rate * N)."""
        if not 0 <= rate <= 1:
            raise AnnotationError(f"rate {rate} outside [0, 1]")
        with self._lock:
            submitted = sorted(
                (s for s in self.sessions.values() if s.status is SessionStatus.SUBMITTED),
                key=lambda s: s.session_id,
            )
        k = round(rate * len(submitted))
        return random.Random(seed).sample(submitted, k)

    # -- judgments --------------------------------------------------------------

    def record_judgment(self, record: JudgmentRecord) -> str:
        with self._lock:
            if record.axis not in JUDGMENT_AXES:
                raise ScoreOutOfRange(f"unknown axis {record.axis!r}")
            lo, hi = JUDGMENT_AXES[record.axis]
            if not lo <= record.score <= hi:
                raise ScoreOutOfRange(
                    f"{record.axis} score {record.score} outside {lo}..{hi}"
                )
            if (record.instance_id, record.system_id) not in self.outputs:
                raise UnknownOutput(f"({record.instance_id}, {record.system_id})")
            event = {
                "event": "judgment",
                "judge_id": record.judge_id,
                "instance_id": record.instance_id,
                "system_id": record.system_id,
                "axis": record.axis,
                "score": record.score,
            }
            self.journal.append(event)
            self._apply(event)
            return f"{record.judge_id}:{record.instance_id}:{record.system_id}:{record.axis}"

    def aggregate_judgments(
        self, instance_id: str, system_id: str, axis: str
    ) -> tuple[float, int]:
        with self._lock:
            scores = [
                r.score
                for r in self.judgments.values()
                if r.instance_id == instance_id
                and r.system_id == system_id
                and r.axis == axis
            ]
        if not scores:
            raise NoJudgments(f"({instance_id}, {system_id}, {axis})")
        return sum(scores) / len(scores), len(scores)
