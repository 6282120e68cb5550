"""
Annotation workflow walkthrough
===============================

Takes one worker through the qualification pipeline (three open rounds, the
tutorial gate, three closed rounds), then records a full annotation session:
embolden hints, saved alignments, duplicate detection, and the submit receipt.
"""

import tempfile

from fusebench.annotation.service import AdvanceStep, AnnotationService
from fusebench.corpus import Alignment, Highlight, Review, ReviewSet, Span, Summary

with tempfile.TemporaryDirectory() as data_dir:
    service = AnnotationService(data_dir)

    reviews = (
        Review.build("r0", "The pool was great and clean. Staff were friendly."),
        Review.build("r1", "Our room was cleaned daily. The pool area felt crowded."),
    )
    review_set = ReviewSet(id="set-1", reviews=reviews)
    summary = Summary.build("sum-1", "The pool was great. The rooms were clean.")
    service.register_pair(review_set, summary)

    # Qualification: open rounds, tutorial, closed rounds.
    service.create_worker("alex")
    for _ in range(3):
        state = service.advance_qualification("alex", passed=True, reviewer_note="ok")
    print(f"after open rounds: {state.stage.value}, awaiting tutorial "
          f"{state.awaiting_tutorial}")
    service.complete_tutorial("alex")
    for _ in range(3):
        state = service.advance_qualification("alex", passed=True)
    print(f"after closed rounds: {state.stage.value}")

    # A real session. Embolden suggests review tokens whose stems overlap
    # the focused summary sentence.
    session = service.start_session("alex", "set-1", "sum-1")
    hints = service.embolden(session.session_id, review_index=0)
    print("embolden (review 0, sentence 0):",
          [reviews[0].tokens[i].text for i in hints])

    alignment = Alignment(0, (Span(0, 18),), Highlight("r0", (Span(0, 28),)), "alex")
    print("first save:", service.save_alignment(session.session_id, alignment))
    print("second save:", service.save_alignment(session.session_id, alignment))

    service.advance(session.session_id, AdvanceStep.NEXT_SENTENCE)
    receipt = service.submit_session(session.session_id)
    print("receipt:", receipt)

    # The journal survives a restart: a fresh service replays it.
    reloaded = AnnotationService(data_dir)
    reloaded.register_pair(review_set, summary)
    replayed = reloaded.get_session(session.session_id)
    print(f"after replay: {len(replayed.saved_alignments)} alignment(s), "
          f"status {replayed.status.value}")
