import random

import pytest

from fusebench.corpus import (
    Alignment,
    FiCInstance,
    Highlight,
    Origin,
    Review,
    ReviewSet,
    Span,
    Split,
    Summary,
)


def make_instance(
    instance_id="inst-1",
    review_texts=("The pool was great and clean. Staff were friendly.",
                  "Our room was cleaned daily. The pool area felt crowded."),
    summary_text="The pool was great. The rooms were clean.",
    alignments=None,
    split=Split.TRAIN,
    set_id="set-1",
):
    reviews = tuple(
        Review.build(f"r{i}", text) for i, text in enumerate(review_texts)
    )
    review_set = ReviewSet(id=set_id, reviews=reviews, origin=Origin.OTHER)
    summary = Summary.build(f"{set_id}-summary", summary_text)
    if alignments is None:
        alignments = (
            Alignment(
                summary_sentence_index=0,
                summary_spans=(Span(0, 18),),
                highlight=Highlight(review_id="r0", spans=(Span(0, 28),)),
                annotator_id="w1",
            ),
            Alignment(
                summary_sentence_index=1,
                summary_spans=(Span(20, 41),),
                highlight=Highlight(review_id="r1", spans=(Span(0, 27),)),
                annotator_id="w1",
            ),
        )
    return FiCInstance.build(
        instance_id=instance_id,
        review_set=review_set,
        fused_text=summary,
        alignments=alignments,
        split=split,
    )


WORDS = [
    "pool", "room", "staff", "clean", "great", "small", "friendly", "noisy",
    "breakfast", "location", "bed", "view", "cheap", "modern", "old",
]


def random_sentence(rng: random.Random, n_words=None) -> str:
    n = n_words or rng.randint(3, 7)
    words = [rng.choice(WORDS) for _ in range(n)]
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


def random_instance(rng: random.Random, n_reviews=2, n_summary_sentences=3,
                    n_alignments=4, instance_id=None, set_id=None):
    """Instance with random texts and random in-bounds alignments."""
    review_texts = [
        " ".join(random_sentence(rng) for _ in range(rng.randint(2, 4)))
        for _ in range(n_reviews)
    ]
    summary_text = " ".join(random_sentence(rng) for _ in range(n_summary_sentences))
    reviews = tuple(Review.build(f"r{i}", t) for i, t in enumerate(review_texts))
    set_id = set_id or f"set-{rng.randint(0, 10 ** 6)}"
    review_set = ReviewSet(id=set_id, reviews=reviews)
    summary = Summary.build(f"{set_id}-sum", summary_text)

    alignments = []
    for _ in range(n_alignments):
        review = rng.choice(reviews)
        sent_idx = rng.randrange(len(summary.sentences))
        sent = summary.sentences[sent_idx]
        # random token-aligned review span
        tok_a = rng.randrange(len(review.tokens))
        tok_b = min(tok_a + rng.randint(0, 4), len(review.tokens) - 1)
        alignments.append(
            Alignment(
                summary_sentence_index=sent_idx,
                summary_spans=(Span(sent.start, sent.end),),
                highlight=Highlight(
                    review_id=review.id,
                    spans=(Span(review.tokens[tok_a].span.start,
                                review.tokens[tok_b].span.end),),
                ),
                annotator_id=f"w{rng.randint(1, 3)}",
            )
        )
    return FiCInstance.build(
        instance_id=instance_id or f"{set_id}::sum",
        review_set=review_set,
        fused_text=summary,
        alignments=tuple(alignments),
    )


@pytest.fixture
def instance():
    return make_instance()
