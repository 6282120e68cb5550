"""Canonical data types for reviews, summaries, highlights and alignments,
plus the deterministic segmentation used by every other module.

Character offsets are the canonical span representation; token indices are
derived on demand. All types are immutable value objects and all functions
here are pure.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator

from .stemming import is_stopword, porter_stem

__all__ = [
    "Span", "Token", "Review", "ReviewSet", "Summary", "Highlight",
    "Alignment", "FiCInstance", "SystemOutput", "Origin", "Split",
    "tokenize", "split_sentences", "validate_instance", "merge_spans",
    "merge_highlights", "instance_to_json", "instance_from_json",
    "load_instances", "dump_instances",
]


class Origin(str, Enum):
    COCOTRIP = "CocoTrip"
    FEWSUM = "FewSum"
    OTHER = "Other"


class Split(str, Enum):
    TRAIN = "Train"
    DEV = "Dev"
    TEST = "Test"


@dataclass(frozen=True, order=True)
class Span:
    """Half-open character range [start, end) into some text."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span ({self.start}, {self.end})")

    def slice(self, text: str) -> str:
        return text[self.start : self.end]

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def to_pair(self) -> list[int]:
        return [self.start, self.end]


@dataclass(frozen=True)
class Token:
    text: str
    span: Span
    is_content_word: bool
    stem: str


# Word = run of letters/digits, optionally apostrophe-joined ("don't", "it's").
# Anything else non-whitespace groups into maximal punctuation runs.
_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*|[^\w\s]+|_+", re.UNICODE)

_HAS_LETTER_RE = re.compile(r"[^\W\d_]", re.UNICODE)


def tokenize(text: str) -> list[Token]:
    """Deterministic word/punctuation tokenization with stems and
    content-word flags. Lossless: every token's text equals the source
    substring at its span."""
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        word = m.group()
        lower = word.lower()
        has_letter = bool(_HAS_LETTER_RE.search(word))
        tokens.append(
            Token(
                text=word,
                span=Span(m.start(), m.end()),
                is_content_word=has_letter and not is_stopword(lower),
                stem=porter_stem(lower) if has_letter else lower,
            )
        )
    return tokens


# Common abbreviations whose trailing period does not end a sentence.
ABBREVIATIONS = frozenset(
    {
        "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "ave", "blvd",
        "etc", "vs", "e.g", "i.e", "approx", "dept", "est", "fig", "gen",
        "inc", "ltd", "no", "vol", "min", "max", "sq", "ft", "oz", "lb",
        "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
        "oct", "nov", "dec", "mon", "tue", "wed", "thu", "fri", "sat", "sun",
    }
)

_TERMINATOR_RE = re.compile(r"[.!?]+")
_WORD_BEFORE_RE = re.compile(r"[\w.]+$", re.UNICODE)


def split_sentences(text: str) -> list[Span]:
    """Split into sentence spans covering all non-whitespace text.

    A sentence boundary is a run of '.', '!' or '?' followed by whitespace
    and an uppercase letter or digit, unless the preceding word is a known
    abbreviation (periods only).
    """
    if not text.strip():
        return []
    breaks = []
    for m in _TERMINATOR_RE.finditer(text):
        end = m.end()
        rest = text[end:]
        stripped = rest.lstrip()
        if not stripped or len(stripped) == len(rest):
            continue  # end of text, or no whitespace after terminator
        nxt = stripped[0]
        if not (nxt.isupper() or nxt.isdigit()):
            continue
        if "." in m.group():
            before = _WORD_BEFORE_RE.search(text, 0, m.start())
            if before and before.group().rstrip(".").lower() in ABBREVIATIONS:
                continue
        breaks.append(end)

    spans = []
    start = 0
    for b in breaks + [len(text)]:
        chunk = text[start:b]
        lead = len(chunk) - len(chunk.lstrip())
        trail = len(chunk) - len(chunk.rstrip())
        if chunk.strip():
            spans.append(Span(start + lead, b - trail))
        start = b
    return spans


def _segment(text: str) -> tuple[list[Token], list[Span]]:
    return tokenize(text), split_sentences(text)


@dataclass(frozen=True)
class Review:
    id: str
    text: str
    tokens: tuple[Token, ...] = field(compare=False)
    sentences: tuple[Span, ...] = field(compare=False)

    @classmethod
    def build(cls, id: str, text: str) -> "Review":
        text = unicodedata.normalize("NFC", text)
        tokens, sentences = _segment(text)
        return cls(id=id, text=text, tokens=tuple(tokens), sentences=tuple(sentences))


@dataclass(frozen=True)
class Summary:
    id: str
    text: str
    tokens: tuple[Token, ...] = field(compare=False)
    sentences: tuple[Span, ...] = field(compare=False)

    @classmethod
    def build(cls, id: str, text: str) -> "Summary":
        text = unicodedata.normalize("NFC", text)
        tokens, sentences = _segment(text)
        return cls(id=id, text=text, tokens=tuple(tokens), sentences=tuple(sentences))


@dataclass(frozen=True)
class ReviewSet:
    id: str
    reviews: tuple[Review, ...]
    origin: Origin = Origin.OTHER

    def review_by_id(self, review_id: str) -> Review:
        for r in self.reviews:
            if r.id == review_id:
                return r
        raise KeyError(review_id)


@dataclass(frozen=True)
class Highlight:
    review_id: str
    spans: tuple[Span, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "spans", tuple(self.spans))

    def text_in(self, review: Review) -> str:
        """Span texts joined with single spaces, in offset order."""
        return " ".join(s.slice(review.text) for s in self.spans)


@dataclass(frozen=True)
class Alignment:
    summary_sentence_index: int
    summary_spans: tuple[Span, ...]
    highlight: Highlight
    annotator_id: str
    aspect_label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "summary_spans", tuple(self.summary_spans))


@dataclass(frozen=True)
class SystemOutput:
    instance_id: str
    system_id: str
    passage: str
    sentences: tuple[Span, ...] = field(compare=False)

    @classmethod
    def build(cls, instance_id: str, system_id: str, passage: str) -> "SystemOutput":
        passage = unicodedata.normalize("NFC", passage)
        return cls(instance_id, system_id, passage, tuple(split_sentences(passage)))


def merge_spans(spans: Iterable[Span]) -> tuple[Span, ...]:
    """Union of character ranges: overlapping or touching spans coalesce."""
    merged: list[Span] = []
    for s in sorted(spans):
        if merged and s.start <= merged[-1].end:
            if s.end > merged[-1].end:
                merged[-1] = Span(merged[-1].start, s.end)
        else:
            merged.append(s)
    return tuple(merged)


def merge_highlights(alignments: Iterable[Alignment]) -> tuple[Highlight, ...]:
    """Deduplicated union of alignment highlights, one Highlight per review
    with overlapping spans merged. Review order follows first appearance."""
    by_review: dict[str, list[Span]] = {}
    for a in alignments:
        by_review.setdefault(a.highlight.review_id, []).extend(a.highlight.spans)
    return tuple(
        Highlight(review_id=rid, spans=merge_spans(spans))
        for rid, spans in by_review.items()
    )


@dataclass(frozen=True)
class FiCInstance:
    instance_id: str
    review_set: ReviewSet
    highlights: tuple[Highlight, ...]
    fused_text: Summary
    alignments: tuple[Alignment, ...]
    split: Split = Split.TRAIN

    @classmethod
    def build(
        cls,
        instance_id: str,
        review_set: ReviewSet,
        fused_text: Summary,
        alignments: Iterable[Alignment],
        split: Split = Split.TRAIN,
    ) -> "FiCInstance":
        alignments = tuple(alignments)
        return cls(
            instance_id=instance_id,
            review_set=review_set,
            highlights=merge_highlights(alignments),
            fused_text=fused_text,
            alignments=alignments,
            split=split,
        )


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str

    def __str__(self) -> str:
        return f"{self.field}: {self.rule}"


def _check_segmentation(text: str, tokens: Iterable[Token], where: str) -> Iterator[Violation]:
    prev_end = -1
    for i, t in enumerate(tokens):
        if t.span.end > len(text):
            yield Violation(f"{where}.tokens[{i}]", "token span exceeds text length")
        elif t.text != t.span.slice(text):
            yield Violation(f"{where}.tokens[{i}]", "token text differs from source substring")
        if t.span.start < prev_end:
            yield Violation(f"{where}.tokens[{i}]", "tokens overlap or are unsorted")
        prev_end = t.span.end


def validate_instance(instance: FiCInstance) -> list[Violation]:
    """Structural validation. Empty report iff every type invariant holds.
    Violations are data, not exceptions."""
    out: list[Violation] = []
    rs = instance.review_set

    ids = [r.id for r in rs.reviews]
    if len(set(ids)) != len(ids):
        out.append(Violation("review_set.reviews", "duplicate review ids"))

    for r in rs.reviews:
        out.extend(_check_segmentation(r.text, r.tokens, f"review[{r.id}]"))
    out.extend(_check_segmentation(instance.fused_text.text, instance.fused_text.tokens, "summary"))

    if not instance.fused_text.text.strip():
        out.append(Violation("fused_text", "fused text is empty"))

    review_by_id = {r.id: r for r in rs.reviews}
    n_sents = len(instance.fused_text.sentences)

    def check_highlight(h: Highlight, where: str) -> None:
        review = review_by_id.get(h.review_id)
        if review is None:
            out.append(Violation(where, f"unknown review id {h.review_id!r}"))
            return
        if not h.spans:
            out.append(Violation(where, "highlight has no spans"))
        prev = None
        for s in h.spans:
            if s.end > len(review.text):
                out.append(Violation(where, f"span ({s.start},{s.end}) exceeds review length {len(review.text)}"))
            if prev is not None and s.start < prev.end:
                out.append(Violation(where, "highlight spans overlap or are unsorted"))
            prev = s

    for i, h in enumerate(instance.highlights):
        check_highlight(h, f"highlights[{i}]")

    for i, a in enumerate(instance.alignments):
        where = f"alignments[{i}]"
        if not (0 <= a.summary_sentence_index < n_sents):
            out.append(Violation(where, f"sentence index {a.summary_sentence_index} outside 0..{n_sents - 1}"))
        else:
            sent = instance.fused_text.sentences[a.summary_sentence_index]
            for s in a.summary_spans:
                if s.start < sent.start or s.end > sent.end:
                    out.append(Violation(where, "summary span outside the indexed sentence"))
        check_highlight(a.highlight, where + ".highlight")

    if merge_highlights(instance.alignments) != instance.highlights:
        out.append(Violation("highlights", "not the merged union of alignment highlights"))

    return out


# ---------------------------------------------------------------------------
# Interchange format: one JSON document per instance. Segmentation is never
# serialized; it is recomputed deterministically on load.

def instance_to_json(instance: FiCInstance) -> dict:
    return {
        "instance_id": instance.instance_id,
        "split": instance.split.value,
        "origin": instance.review_set.origin.value,
        "reviews": [{"id": r.id, "text": r.text} for r in instance.review_set.reviews],
        "summary": {"id": instance.fused_text.id, "text": instance.fused_text.text},
        "alignments": [
            {
                "summary_sentence_index": a.summary_sentence_index,
                "summary_spans": [s.to_pair() for s in a.summary_spans],
                "review_id": a.highlight.review_id,
                "highlight_spans": [s.to_pair() for s in a.highlight.spans],
                **({"aspect_label": a.aspect_label} if a.aspect_label else {}),
                "annotator_id": a.annotator_id,
            }
            for a in instance.alignments
        ],
    }


def instance_from_json(doc: dict, review_set_id: str | None = None) -> FiCInstance:
    review_set = ReviewSet(
        id=review_set_id or doc.get("review_set_id", doc["instance_id"] + ":reviews"),
        reviews=tuple(Review.build(r["id"], r["text"]) for r in doc["reviews"]),
        origin=Origin(doc.get("origin", "Other")),
    )
    alignments = tuple(
        Alignment(
            summary_sentence_index=a["summary_sentence_index"],
            summary_spans=tuple(Span(s, e) for s, e in a["summary_spans"]),
            highlight=Highlight(
                review_id=a["review_id"],
                spans=tuple(Span(s, e) for s, e in a["highlight_spans"]),
            ),
            aspect_label=a.get("aspect_label"),
            annotator_id=a["annotator_id"],
        )
        for a in doc["alignments"]
    )
    return FiCInstance.build(
        instance_id=doc["instance_id"],
        review_set=review_set,
        fused_text=Summary.build(doc["summary"]["id"], doc["summary"]["text"]),
        alignments=alignments,
        split=Split(doc.get("split", "Train")),
    )


def dump_instances(instances: Iterable[FiCInstance], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for inst in instances:
            f.write(json.dumps(instance_to_json(inst), ensure_ascii=False) + "\n")


def load_instances(path) -> list[FiCInstance]:
    out = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                out.append(instance_from_json(json.loads(line)))
    return out
