"""Scoring mathematics: lexical metrics, highlight faithfulness/coverage
orchestration over a scorer gateway, token-IoU agreement, Cohen's kappa and
the harmonic F-1 aggregate.

Scores are computed in [0, 1] internally; report-level numbers use a 0-100
scale and are rounded to one decimal only at render time.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .corpus import Alignment, FiCInstance, Highlight, SystemOutput
from .gateway import Scorer, ScorerKind, ScorerRequest


class MetricError(ValueError):
    pass


class EmptyHighlights(MetricError):
    pass


class LengthMismatch(MetricError):
    pass


class InstanceMismatch(MetricError):
    pass


@dataclass(frozen=True)
class MetricScore:
    name: str
    value: float
    recall: float | None = None
    precision: float | None = None
    f1: float | None = None

    def as_dict(self) -> dict:
        d = {"name": self.name, "value": self.value}
        for k in ("recall", "precision", "f1"):
            v = getattr(self, k)
            if v is not None:
                d[k] = v
        return d


def _prf(name: str, overlap: float, ref_total: float, cand_total: float) -> MetricScore:
    # Zero-denominator convention: 0.
    recall = overlap / ref_total if ref_total else 0.0
    precision = overlap / cand_total if cand_total else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return MetricScore(name=name, value=f1, recall=recall, precision=precision, f1=f1)


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(reference: Sequence[str], candidate: Sequence[str], n: int) -> MetricScore:
    """Clipped (multiset) n-gram overlap over lowercased tokens."""
    if n < 1:
        raise MetricError("n must be >= 1")
    ref = _ngrams([t.lower() for t in reference], n)
    cand = _ngrams([t.lower() for t in candidate], n)
    overlap = sum((ref & cand).values())
    return _prf(f"rouge-{n}", overlap, sum(ref.values()), sum(cand.values()))


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_l(reference: Sequence[str], candidate: Sequence[str]) -> MetricScore:
    ref = [t.lower() for t in reference]
    cand = [t.lower() for t in candidate]
    lcs = _lcs_length(ref, cand)
    return _prf("rouge-l", lcs, len(ref), len(cand))


def meteor_lite(reference: Sequence[str], candidate: Sequence[str]) -> MetricScore:
    """METEOR-style unigram alignment without synonym tables.

    Candidate tokens match reference tokens exactly first, then by stem.
    Score = F_mean * (1 - penalty), with recall weighted 9:1 over precision
    and fragmentation penalty 0.5 * (chunks / matches)^3.
    """
    from .stemming import porter_stem

    ref = [t.lower() for t in reference]
    cand = [t.lower() for t in candidate]

    # cand index -> matched ref index; greedy left-to-right, exact pass first.
    match_of: dict[int, int] = {}
    used_ref: set[int] = set()
    for exact in (True, False):
        for i, c in enumerate(cand):
            if i in match_of:
                continue
            key = c if exact else porter_stem(c)
            for j, r in enumerate(ref):
                if j in used_ref:
                    continue
                if (r if exact else porter_stem(r)) == key:
                    match_of[i] = j
                    used_ref.add(j)
                    break

    matches = len(match_of)
    if matches == 0:
        return MetricScore(name="meteor-lite", value=0.0, recall=0.0, precision=0.0, f1=0.0)

    precision = matches / len(cand)
    recall = matches / len(ref)
    f_mean = 10 * precision * recall / (recall + 9 * precision)

    # Chunks: maximal runs of candidate matches mapping to consecutive
    # reference positions.
    pairs = sorted(match_of.items())
    chunks = 1
    for (ci0, ri0), (ci1, ri1) in zip(pairs, pairs[1:]):
        if not (ci1 == ci0 + 1 and ri1 == ri0 + 1):
            chunks += 1
    penalty = 0.5 * (chunks / matches) ** 3
    score = f_mean * (1 - penalty)
    return MetricScore(name="meteor-lite", value=score, recall=recall, precision=precision)


def harmonic_f1(faithfulness: float, coverage: float) -> float:
    """Harmonic mean 2ab/(a+b) on the 0-100 scale; 0 when both are 0."""
    if faithfulness == 0 and coverage == 0:
        return 0.0
    return 2 * faithfulness * coverage / (faithfulness + coverage)


def round_score(x: float) -> float:
    return round(x, 1)


# ---------------------------------------------------------------------------
# Gateway-backed faithfulness and coverage

class CoverageMode(str, Enum):
    TRAINED = "trained"
    NLI = "nli"


def _highlight_texts(instance: FiCInstance, highlights: Sequence[Highlight]) -> list[str]:
    by_id = {r.id: r for r in instance.review_set.reviews}
    return [h.text_in(by_id[h.review_id]) for h in highlights]


def concatenated_highlights(instance: FiCInstance, highlights: Sequence[Highlight] | None = None) -> str:
    """Highlight span texts in document order, joined by single spaces."""
    hs = instance.highlights if highlights is None else highlights
    return " ".join(t for t in _highlight_texts(instance, hs) if t)


def faithfulness_score(
    output: SystemOutput, instance: FiCInstance, gateway: Scorer
) -> tuple[float, list[float]]:
    """Entailment of each output sentence by the concatenated highlights.

    Premise = all highlight texts joined in document order; one entailment
    call per output sentence; overall = arithmetic mean, in [0, 1].
    """
    if not instance.highlights:
        raise EmptyHighlights(instance.instance_id)
    premise = concatenated_highlights(instance)
    requests = [
        ScorerRequest(
            kind=ScorerKind.ENTAILMENT,
            premise_or_context=premise,
            hypothesis_or_query=s.slice(output.passage),
            request_id=f"{output.instance_id}:faith:{i}",
        )
        for i, s in enumerate(output.sentences)
    ]
    per_sentence = [r.probability for r in gateway.score_batch(requests)]
    return sum(per_sentence) / len(per_sentence), per_sentence


def trained_faithfulness_score(
    output: SystemOutput, instance: FiCInstance, gateway: Scorer
) -> tuple[float, list[float]]:
    """Alternative faithfulness: containment-style call per output sentence
    against all highlights, averaged."""
    if not instance.highlights:
        raise EmptyHighlights(instance.instance_id)
    context = concatenated_highlights(instance)
    requests = [
        ScorerRequest(
            kind=ScorerKind.CONTAINMENT,
            premise_or_context=context,
            hypothesis_or_query=s.slice(output.passage),
            request_id=f"{output.instance_id}:tfaith:{i}",
        )
        for i, s in enumerate(output.sentences)
    ]
    per_sentence = [r.probability for r in gateway.score_batch(requests)]
    return sum(per_sentence) / len(per_sentence), per_sentence


def coverage_score(
    output: SystemOutput,
    instance: FiCInstance,
    gateway: Scorer,
    mode: CoverageMode = CoverageMode.TRAINED,
) -> tuple[float, list[float]]:
    """One call per highlight against the full output passage.

    Trained mode asks for P("yes" the highlight is contained); NLI mode asks
    for entailment with the passage as premise and the highlight as
    hypothesis. Overall = arithmetic mean, in [0, 1].
    """
    if not instance.highlights:
        raise EmptyHighlights(instance.instance_id)
    texts = _highlight_texts(instance, instance.highlights)
    requests = []
    for i, h_text in enumerate(texts):
        if mode is CoverageMode.TRAINED:
            req = ScorerRequest(
                kind=ScorerKind.CONTAINMENT,
                premise_or_context=output.passage,
                hypothesis_or_query=h_text,
                request_id=f"{output.instance_id}:cov:{i}",
            )
        else:
            req = ScorerRequest(
                kind=ScorerKind.ENTAILMENT,
                premise_or_context=output.passage,
                hypothesis_or_query=h_text,
                request_id=f"{output.instance_id}:cov:{i}",
            )
        requests.append(req)
    per_highlight = [r.probability for r in gateway.score_batch(requests)]
    return sum(per_highlight) / len(per_highlight), per_highlight


# ---------------------------------------------------------------------------
# Agreement

def iou_agreement(
    annotations_a: Sequence[Alignment],
    annotations_b: Sequence[Alignment],
    instance: FiCInstance,
) -> tuple[float, list[float]]:
    """Token-index intersection-over-union between two annotators.

    Per summary sentence, each annotator's set is the (review_id, token
    index) pairs of content-word review tokens covered by their aligned
    highlights. Overall = mean over sentences where at least one annotator
    aligned something, on the 0-100 scale.
    """
    for a in list(annotations_a) + list(annotations_b):
        if not (0 <= a.summary_sentence_index < len(instance.fused_text.sentences)):
            raise InstanceMismatch(
                f"alignment sentence index {a.summary_sentence_index} not in instance"
            )

    def token_set(alignments: Sequence[Alignment], sentence: int) -> set[tuple[str, int]]:
        out: set[tuple[str, int]] = set()
        for a in alignments:
            if a.summary_sentence_index != sentence:
                continue
            review = instance.review_set.review_by_id(a.highlight.review_id)
            for i, tok in enumerate(review.tokens):
                if tok.is_content_word and any(tok.span.overlaps(s) for s in a.highlight.spans):
                    out.add((review.id, i))
        return out

    per_sentence: list[float] = []
    for s in range(len(instance.fused_text.sentences)):
        set_a = token_set(annotations_a, s)
        set_b = token_set(annotations_b, s)
        if not set_a and not set_b:
            continue
        per_sentence.append(len(set_a & set_b) / len(set_a | set_b))
    if not per_sentence:
        return 100.0, []
    return 100.0 * sum(per_sentence) / len(per_sentence), [100.0 * v for v in per_sentence]


def cohens_kappa(ratings_a: Sequence, ratings_b: Sequence) -> float:
    """Cohen's kappa with empirical marginals over two equal-length rating
    vectors. Returns 1.0 for perfect agreement even when chance agreement
    is 1 (single category used by both raters)."""
    if len(ratings_a) != len(ratings_b):
        raise LengthMismatch(f"{len(ratings_a)} vs {len(ratings_b)}")
    if not ratings_a:
        raise MetricError("empty ratings")
    n = len(ratings_a)
    p_o = sum(a == b for a, b in zip(ratings_a, ratings_b)) / n
    marg_a = Counter(ratings_a)
    marg_b = Counter(ratings_b)
    cats = set(marg_a) | set(marg_b)
    p_e = sum((marg_a[c] / n) * (marg_b[c] / n) for c in cats)
    if p_e == 1.0:
        return 1.0 if p_o == 1.0 else 0.0
    return (p_o - p_e) / (1 - p_e)


# ---------------------------------------------------------------------------
# Report assembly

@dataclass(frozen=True)
class ScoreReport:
    """Per-output scores. faithfulness/coverage/f1 are on the 0-100 scale;
    per-unit lists are likewise 0-100 so the mean invariants hold directly."""

    instance_id: str
    system_id: str
    faithfulness: float
    coverage: float
    f1: float
    per_sentence_faithfulness: tuple[float, ...]
    per_highlight_coverage: tuple[float, ...]
    lexical: dict[str, MetricScore] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "system_id": self.system_id,
            "faithfulness": self.faithfulness,
            "coverage": self.coverage,
            "f1": self.f1,
            "per_sentence_faithfulness": list(self.per_sentence_faithfulness),
            "per_highlight_coverage": list(self.per_highlight_coverage),
            "lexical": {k: v.as_dict() for k, v in self.lexical.items()},
        }


DEFAULT_LEXICAL = ("rouge-1", "rouge-2", "rouge-l", "meteor-lite")


def evaluate_output(
    instance: FiCInstance,
    output: SystemOutput,
    gateway: Scorer,
    coverage_mode: CoverageMode = CoverageMode.TRAINED,
    lexical: Sequence[str] = DEFAULT_LEXICAL,
) -> ScoreReport:
    """Full per-output report. The lexical reference is the concatenated
    highlights (the only-highlights rendering)."""
    if instance.instance_id != output.instance_id:
        raise InstanceMismatch(f"{instance.instance_id} vs {output.instance_id}")

    faith, per_sent = faithfulness_score(output, instance, gateway)
    cov, per_high = coverage_score(output, instance, gateway, coverage_mode)

    from .corpus import tokenize

    ref_tokens = [t.text for t in tokenize(concatenated_highlights(instance))]
    cand_tokens = [t.text for t in tokenize(output.passage)]
    lex: dict[str, MetricScore] = {}
    for name in lexical:
        if name == "rouge-l":
            lex[name] = rouge_l(ref_tokens, cand_tokens)
        elif name == "meteor-lite":
            lex[name] = meteor_lite(ref_tokens, cand_tokens)
        elif name.startswith("rouge-"):
            lex[name] = rouge_n(ref_tokens, cand_tokens, int(name.split("-")[1]))
        else:
            raise MetricError(f"unknown lexical metric {name!r}")

    f100 = 100.0 * faith
    c100 = 100.0 * cov
    return ScoreReport(
        instance_id=instance.instance_id,
        system_id=output.system_id,
        faithfulness=f100,
        coverage=c100,
        f1=harmonic_f1(f100, c100),
        per_sentence_faithfulness=tuple(100.0 * v for v in per_sent),
        per_highlight_coverage=tuple(100.0 * v for v in per_high),
        lexical=lex,
    )


def render_report_table(reports: Sequence[ScoreReport]) -> str:
    """Plain-text table with Faithfulness / Coverage / F-1 columns."""
    header = f"{'System':<24}{'Faithfulness':>14}{'Coverage':>10}{'F-1':>8}"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(
            f"{r.system_id:<24}{round_score(r.faithfulness):>14.1f}"
            f"{round_score(r.coverage):>10.1f}{round_score(r.f1):>8.1f}"
        )
    return "\n".join(lines)
