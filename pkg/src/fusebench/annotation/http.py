"""HTTP+JSON surface over the annotation service and leaderboard.

Paths are contractual: POST /sessions, GET /sessions/{id},
POST /sessions/{id}/alignments, POST /sessions/{id}/advance,
POST /sessions/{id}/submit, GET /sessions/{id}/embolden?review=k,
POST /workers/{id}/qualification, POST /judgments, GET /judgments/aggregate,
POST /submissions, GET /leaderboard.
"""

from __future__ import annotations

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from ..corpus import Alignment, Highlight, Span
from . import service as svc


def _error(status: int, exc: Exception) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


_STATUS = {
    svc.UnknownPair: 404,
    svc.UnknownWorker: 404,
    svc.UnknownSession: 404,
    svc.UnknownOutput: 404,
    svc.NoJudgments: 404,
    svc.UnqualifiedWorker: 403,
    svc.PairAlreadyAssigned: 409,
    svc.SessionClosed: 409,
    svc.TerminalState: 409,
    svc.SpanOutOfBounds: 422,
    svc.WrongFocusedSentence: 422,
    svc.IndexOutOfRange: 422,
    svc.ScoreOutOfRange: 422,
}


def create_app(service: svc.AnnotationService, leaderboard=None) -> FastAPI:
    app = FastAPI(title="fusebench annotation service")

    @app.exception_handler(svc.AnnotationError)
    async def annotation_error_handler(request: Request, exc: svc.AnnotationError):
        return _error(_STATUS.get(type(exc), 400), exc)

    @app.post("/workers")
    def create_worker(body: dict):
        profile = service.create_worker(body["worker_id"])
        return {"worker_id": profile.worker_id, "qualification": profile.qualification.as_dict()}

    @app.post("/workers/{worker_id}/qualification")
    def qualification(worker_id: str, body: dict):
        if body.get("tutorial_completed"):
            state = service.complete_tutorial(worker_id)
        else:
            state = service.advance_qualification(
                worker_id,
                passed=bool(body["passed"]),
                reviewer_note=body.get("reviewer_note", ""),
            )
        return state.as_dict()

    @app.post("/sessions")
    def start_session(body: dict):
        session = service.start_session(
            worker_id=body["worker_id"],
            review_set_id=body["review_set_id"],
            summary_id=body["summary_id"],
            training=bool(body.get("training", False)),
        )
        return session.as_dict()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return service.get_session(session_id).as_dict()

    @app.get("/sessions/{session_id}/embolden")
    def embolden(session_id: str, review: int = Query(...)):
        return {"token_indices": service.embolden(session_id, review)}

    @app.post("/sessions/{session_id}/alignments")
    def save_alignment(session_id: str, body: dict):
        alignment = Alignment(
            summary_sentence_index=body["summary_sentence_index"],
            summary_spans=tuple(Span(s, e) for s, e in body["summary_spans"]),
            highlight=Highlight(
                review_id=body["review_id"],
                spans=tuple(Span(s, e) for s, e in body["highlight_spans"]),
            ),
            aspect_label=body.get("aspect_label"),
            annotator_id=body["annotator_id"],
        )
        status = service.save_alignment(session_id, alignment)
        return {"status": status, "session": service.get_session(session_id).as_dict()}

    @app.post("/sessions/{session_id}/advance")
    def advance(session_id: str, body: dict):
        session = service.advance(session_id, svc.AdvanceStep(body["step"]))
        return session.as_dict()

    @app.post("/sessions/{session_id}/submit")
    def submit(session_id: str):
        return service.submit_session(session_id)

    @app.post("/judgments")
    def record_judgment(body: dict):
        record = svc.JudgmentRecord(
            judge_id=body["judge_id"],
            instance_id=body["instance_id"],
            system_id=body["system_id"],
            axis=body["axis"],
            score=int(body["score"]),
        )
        return {"id": service.record_judgment(record)}

    @app.get("/judgments/aggregate")
    def aggregate(instance_id: str, system_id: str, axis: str):
        mean, count = service.aggregate_judgments(instance_id, system_id, axis)
        return {"mean": mean, "judges": count}

    if leaderboard is not None:
        from ..leaderboard import SubmissionError

        @app.exception_handler(SubmissionError)
        async def submission_error_handler(request: Request, exc: SubmissionError):
            return _error(422, exc)

        @app.post("/submissions")
        def submit_system(body: dict):
            submission = leaderboard.submit_from_records(
                system_id=body["system_id"],
                outputs=body["outputs"],
                replace=bool(body.get("replace", False)),
            )
            return submission.as_dict()

        @app.get("/leaderboard")
        def get_leaderboard(format: str = "json"):
            table = leaderboard.render()
            if format == "text":
                return PlainTextResponse(table.as_text())
            return table.as_dict()

    return app
