"""Dataset assembly and derived artifacts: instance construction from
alignment stores, statistics tables, split assignment, baseline input
encodings, coverage-classifier training data and k-shot prompts."""

from __future__ import annotations

import json
import random
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .corpus import (
    Alignment,
    FiCInstance,
    Highlight,
    Review,
    ReviewSet,
    Span,
    Split,
    Summary,
    merge_highlights,
    validate_instance,
)


class DatasetError(ValueError):
    pass


class DanglingReference(DatasetError):
    pass


class TooFewSentences(DatasetError):
    pass


class EmptyInput(DatasetError):
    pass


class NotEnoughExemplars(DatasetError):
    pass


class UnbalancedMarkers(DatasetError):
    pass


class NestedMarkers(DatasetError):
    pass


# ---------------------------------------------------------------------------
# Assembly

def assemble_instances(
    pairs: Sequence[tuple[ReviewSet, Summary, Sequence[Alignment]]],
    split_plan: Mapping[str, Split] | None = None,
) -> list[FiCInstance]:
    """One instance per (review_set, summary) pair with merged highlight
    union. Pairs with zero alignments are kept with a warning."""
    out = []
    for review_set, summary, alignments in pairs:
        known = {r.id for r in review_set.reviews}
        for a in alignments:
            if a.highlight.review_id not in known:
                raise DanglingReference(
                    f"alignment references unknown review {a.highlight.review_id!r} "
                    f"in set {review_set.id!r}"
                )
        if not alignments:
            warnings.warn(
                f"pair ({review_set.id}, {summary.id}) has no alignments",
                stacklevel=2,
            )
        instance = FiCInstance.build(
            instance_id=f"{review_set.id}::{summary.id}",
            review_set=review_set,
            fused_text=summary,
            alignments=alignments,
            split=(split_plan or {}).get(review_set.id, Split.TRAIN),
        )
        violations = validate_instance(instance)
        if violations:
            raise DatasetError(
                f"instance {instance.instance_id} invalid: {violations[0]}"
            )
        out.append(instance)
    return out


def assign_splits(
    review_set_ids: Sequence[str],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> dict[str, Split]:
    """Partition review-set ids into Train/Dev/Test by whole sets, so no
    review-set leaks across splits. Deterministic for a given seed."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise DatasetError(f"ratios must sum to 1, got {sum(ratios)}")
    ids = sorted(set(review_set_ids))
    random.Random(seed).shuffle(ids)
    n = len(ids)
    n_train = round(ratios[0] * n)
    n_dev = round(ratios[1] * n)
    plan = {}
    for i, rid in enumerate(ids):
        if i < n_train:
            plan[rid] = Split.TRAIN
        elif i < n_train + n_dev:
            plan[rid] = Split.DEV
        else:
            plan[rid] = Split.TEST
    return plan


# ---------------------------------------------------------------------------
# Statistics

@dataclass(frozen=True)
class StatsRow:
    unique_review_sets: int
    mean_summaries_per_set: float
    pair_count: int
    mean_review_tokens: float
    mean_summary_tokens: float
    max_review_tokens: int
    max_review_set_tokens: int
    max_summary_tokens: int
    mean_review_sentences: float
    mean_summary_sentences: float
    pct_multi_review_sentences: float
    pct_multi_review_sentence_sentences: float
    mean_highlighted_token_fraction: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class StatsTable:
    per_split: dict[str, StatsRow]
    overall: StatsRow

    def as_dict(self) -> dict:
        return {
            "per_split": {k: v.as_dict() for k, v in self.per_split.items()},
            "overall": self.overall.as_dict(),
        }


def _stats_row(instances: Sequence[FiCInstance]) -> StatsRow:
    sets: dict[str, ReviewSet] = {}
    summaries_per_set: dict[str, int] = {}
    for inst in instances:
        sets[inst.review_set.id] = inst.review_set
        summaries_per_set[inst.review_set.id] = summaries_per_set.get(inst.review_set.id, 0) + 1

    reviews = [r for rs in sets.values() for r in rs.reviews]
    review_token_counts = [len(r.tokens) for r in reviews]
    set_token_counts = [sum(len(r.tokens) for r in rs.reviews) for rs in sets.values()]
    summary_token_counts = [len(i.fused_text.tokens) for i in instances]

    multi_review = 0
    multi_sentence = 0
    total_sentences = 0
    for inst in instances:
        by_sentence: dict[int, list[Alignment]] = {}
        for a in inst.alignments:
            by_sentence.setdefault(a.summary_sentence_index, []).append(a)
        total_sentences += len(inst.fused_text.sentences)
        for aligns in by_sentence.values():
            if len({a.highlight.review_id for a in aligns}) >= 2:
                multi_review += 1
            # Within at least one single review, the aligned spans intersect
            # two or more review sentence spans.
            by_review: dict[str, list[Span]] = {}
            for a in aligns:
                by_review.setdefault(a.highlight.review_id, []).extend(a.highlight.spans)
            for rid, spans in by_review.items():
                review = inst.review_set.review_by_id(rid)
                touched = {
                    i
                    for i, sent in enumerate(review.sentences)
                    if any(sent.overlaps(s) for s in spans)
                }
                if len(touched) >= 2:
                    multi_sentence += 1
                    break

    highlighted_fractions = []
    for inst in instances:
        by_review: dict[str, list[Span]] = {}
        for h in inst.highlights:
            by_review.setdefault(h.review_id, []).extend(h.spans)
        for review in inst.review_set.reviews:
            spans = by_review.get(review.id, [])
            if not review.tokens:
                continue
            covered = sum(
                1 for t in review.tokens if any(t.span.overlaps(s) for s in spans)
            )
            highlighted_fractions.append(covered / len(review.tokens))

    def mean(v: Sequence[float]) -> float:
        return sum(v) / len(v) if v else 0.0

    return StatsRow(
        unique_review_sets=len(sets),
        mean_summaries_per_set=mean(list(summaries_per_set.values())),
        pair_count=len(instances),
        mean_review_tokens=mean(review_token_counts),
        mean_summary_tokens=mean(summary_token_counts),
        max_review_tokens=max(review_token_counts, default=0),
        max_review_set_tokens=max(set_token_counts, default=0),
        max_summary_tokens=max(summary_token_counts, default=0),
        mean_review_sentences=mean([len(r.sentences) for r in reviews]),
        mean_summary_sentences=mean([len(i.fused_text.sentences) for i in instances]),
        pct_multi_review_sentences=100.0 * multi_review / total_sentences if total_sentences else 0.0,
        pct_multi_review_sentence_sentences=100.0 * multi_sentence / total_sentences if total_sentences else 0.0,
        mean_highlighted_token_fraction=mean(highlighted_fractions),
    )


def compute_statistics(instances: Sequence[FiCInstance]) -> StatsTable:
    """Statistics per split and overall, mirroring the dataset table:
    unique sets, summaries/set, pairs, token/sentence sizes, multi-review
    and multi-review-sentence percentages, highlighted-token fraction."""
    if not instances:
        raise EmptyInput("no instances")
    per_split = {}
    for split in Split:
        subset = [i for i in instances if i.split is split]
        if subset:
            per_split[split.value] = _stats_row(subset)
    return StatsTable(per_split=per_split, overall=_stats_row(instances))


_STATS_COLUMNS = [
    ("unique_review_sets", "#sets", "d"),
    ("mean_summaries_per_set", "summ/set", ".2f"),
    ("pair_count", "#pairs", "d"),
    ("mean_review_tokens", "rev tok", ".2f"),
    ("mean_summary_tokens", "sum tok", ".2f"),
    ("max_review_tokens", "max rev", "d"),
    ("max_review_set_tokens", "max set", "d"),
    ("max_summary_tokens", "max sum", "d"),
    ("mean_review_sentences", "rev sent", ".2f"),
    ("mean_summary_sentences", "sum sent", ".2f"),
    ("pct_multi_review_sentences", "multi-rev%", ".2f"),
    ("pct_multi_review_sentence_sentences", "multi-sent%", ".2f"),
    ("mean_highlighted_token_fraction", "hl frac", ".3f"),
]


def render_statistics(table: StatsTable) -> str:
    rows = list(table.per_split.items()) + [("Overall", table.overall)]
    header = f"{'':<10}" + "".join(f"{label:>12}" for _, label, _ in _STATS_COLUMNS)
    lines = [header, "-" * len(header)]
    for name, row in rows:
        cells = [f"{name:<10}"]
        for key, _, fmt in _STATS_COLUMNS:
            cells.append(f"{getattr(row, key):>12{fmt}}")
        lines.append("".join(cells))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Coverage-classifier training data

@dataclass(frozen=True)
class CoverageSample:
    highlight_text: str
    modified_summary: str
    label: str  # "Yes" | "No"
    provenance: tuple[str, tuple[int, ...]]  # (instance_id, removed sentence indices)

    def as_dict(self) -> dict:
        return {
            "highlight": self.highlight_text,
            "summary": self.modified_summary,
            "label": self.label,
        }


def _summary_without(summary: Summary, removed: set[int]) -> str:
    kept = [
        s.slice(summary.text)
        for i, s in enumerate(summary.sentences)
        if i not in removed
    ]
    return " ".join(kept)


def generate_coverage_training_data(
    instance: FiCInstance, seed: int = 0
) -> list[CoverageSample]:
    """Synthesize yes/no containment samples from one instance.

    Per highlight: a negative whose modified summary omits every sentence the
    highlight aligns to, and a positive omitting one seeded-random sentence
    the highlight does not align to. Positives are skipped (with a warning)
    when every sentence aligns to the highlight.
    """
    summary = instance.fused_text
    if len(summary.sentences) < 2:
        raise TooFewSentences(instance.instance_id)
    if not instance.alignments:
        raise DatasetError(f"instance {instance.instance_id} has no alignments")

    review_by_id = {r.id: r for r in instance.review_set.reviews}
    rng = random.Random(seed)
    samples: list[CoverageSample] = []
    for highlight in instance.highlights:
        aligned = {
            a.summary_sentence_index
            for a in instance.alignments
            if a.highlight.review_id == highlight.review_id
            and any(
                hs.overlaps(s) for hs in a.highlight.spans for s in highlight.spans
            )
        }
        h_text = highlight.text_in(review_by_id[highlight.review_id])

        samples.append(
            CoverageSample(
                highlight_text=h_text,
                modified_summary=_summary_without(summary, aligned),
                label="No",
                provenance=(instance.instance_id, tuple(sorted(aligned))),
            )
        )

        non_aligned = [
            i for i in range(len(summary.sentences)) if i not in aligned
        ]
        if not non_aligned:
            warnings.warn(
                f"{instance.instance_id}: highlight aligns to every sentence, "
                "positive sample skipped",
                stacklevel=2,
            )
            continue
        drop = rng.choice(non_aligned)
        samples.append(
            CoverageSample(
                highlight_text=h_text,
                modified_summary=_summary_without(summary, {drop}),
                label="Yes",
                provenance=(instance.instance_id, (drop,)),
            )
        )
    return samples


def dump_coverage_samples(samples: Iterable[CoverageSample], path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for s in samples:
            f.write(json.dumps(s.as_dict(), ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Input encodings

MARKER_OPEN = "<extra_token_1>"
MARKER_CLOSE = "<extra_token_2>"
REVIEW_SEPARATOR = "||| review {k}"


class EncodingMode(str, Enum):
    WITH_HIGHLIGHTS = "with_highlights"
    ONLY_HIGHLIGHTS = "only_highlights"
    NO_HIGHLIGHTS = "no_highlights"


@dataclass(frozen=True)
class EncodedInput:
    mode: EncodingMode
    text: str
    marker_open: str = MARKER_OPEN
    marker_close: str = MARKER_CLOSE


def _concat_reviews(
    instance: FiCInstance,
    spans_by_review: Mapping[str, Sequence[Span]],
    separator: str,
) -> str:
    parts = []
    for k, review in enumerate(instance.review_set.reviews, start=1):
        if k > 1:
            parts.append("\n" + separator.format(k=k) + "\n")
        text = review.text
        spans = sorted(spans_by_review.get(review.id, []))
        pieces = []
        cursor = 0
        for s in spans:
            pieces.append(text[cursor : s.start])
            pieces.append(MARKER_OPEN + s.slice(text) + MARKER_CLOSE)
            cursor = s.end
        pieces.append(text[cursor:])
        parts.append("".join(pieces))
    return "".join(parts)


def render_input(
    instance: FiCInstance,
    mode: EncodingMode,
    separator: str = REVIEW_SEPARATOR,
) -> EncodedInput:
    """Render one of the three baseline encodings.

    WithHighlights wraps each merged highlight span in marker tokens inside
    the concatenated reviews; OnlyHighlights joins highlight texts in
    document order with single spaces; NoHighlights is the plain
    concatenation (marker-free, byte-identical to WithHighlights stripped).
    """
    spans_by_review: dict[str, list[Span]] = {}
    for h in instance.highlights:
        spans_by_review.setdefault(h.review_id, []).extend(h.spans)

    if mode is EncodingMode.ONLY_HIGHLIGHTS:
        review_by_id = {r.id: r for r in instance.review_set.reviews}
        texts = []
        for review in instance.review_set.reviews:
            for s in sorted(spans_by_review.get(review.id, [])):
                texts.append(s.slice(review_by_id[review.id].text))
        return EncodedInput(mode=mode, text=" ".join(texts))
    if mode is EncodingMode.NO_HIGHLIGHTS:
        return EncodedInput(mode=mode, text=_concat_reviews(instance, {}, separator))
    return EncodedInput(mode=mode, text=_concat_reviews(instance, spans_by_review, separator))


def decode_markup(encoded: str) -> tuple[str, list[Span]]:
    """Inverse of the WithHighlights rendering: returns (stripped text,
    highlight spans relative to the stripped text)."""
    spans: list[Span] = []
    out: list[str] = []
    pos = 0
    open_start: int | None = None
    stripped_len = 0
    while True:
        next_open = encoded.find(MARKER_OPEN, pos)
        next_close = encoded.find(MARKER_CLOSE, pos)
        if next_open == -1 and next_close == -1:
            out.append(encoded[pos:])
            break
        if next_close == -1 or (next_open != -1 and next_open < next_close):
            if open_start is not None:
                raise NestedMarkers(f"open marker at {next_open} inside open span")
            out.append(encoded[pos:next_open])
            stripped_len += next_open - pos
            open_start = stripped_len
            pos = next_open + len(MARKER_OPEN)
        else:
            if open_start is None:
                raise UnbalancedMarkers(f"close marker at {next_close} without open")
            out.append(encoded[pos:next_close])
            stripped_len += next_close - pos
            spans.append(Span(open_start, stripped_len))
            open_start = None
            pos = next_close + len(MARKER_CLOSE)
    if open_start is not None:
        raise UnbalancedMarkers("unclosed marker at end of text")
    return "".join(out), spans


# ---------------------------------------------------------------------------
# k-shot prompts

PROMPT_HEADER = (
    "Fuse the highlighted review content into one coherent, non-redundant "
    "passage that covers all and only the highlighted information."
)


def build_kshot_prompt(
    exemplars: Sequence[tuple[EncodedInput, str]],
    target: EncodedInput,
    k: int = 1,
) -> str:
    """Instruction header, k exemplar blocks (input then reference fusion),
    then the target input with an empty answer slot."""
    if k > len(exemplars):
        raise NotEnoughExemplars(f"k={k} but only {len(exemplars)} exemplars")
    blocks = [PROMPT_HEADER]
    for encoded, fused in exemplars[:k]:
        blocks.append(f"### Input:\n{encoded.text}\n### Fusion:\n{fused}")
    blocks.append(f"### Input:\n{target.text}\n### Fusion:\n")
    return "\n\n".join(blocks)
