import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fusebench.corpus import (
    Alignment,
    Highlight,
    Span,
    merge_highlights,
    merge_spans,
    instance_from_json,
    instance_to_json,
    split_sentences,
    tokenize,
    validate_instance,
)

from conftest import make_instance, random_instance


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []

    def test_basic(self):
        tokens = tokenize("Great pool!")
        assert [(t.text, t.span.start, t.span.end) for t in tokens] == [
            ("Great", 0, 5),
            ("pool", 6, 10),
            ("!", 10, 11),
        ]

    def test_stems(self):
        assert tokenize("rooms")[0].stem == "room"
        assert tokenize("cleaned")[0].stem == "clean"

    def test_apostrophe_joined(self):
        tokens = tokenize("don't stop")
        assert tokens[0].text == "don't"

    def test_punctuation_run_is_single_token(self):
        tokens = tokenize("wow!!! ...")
        assert [t.text for t in tokens] == ["wow", "!!!", "..."]

    def test_content_word_flags(self):
        tokens = {t.text: t for t in tokenize("the pool was great , 42")}
        assert not tokens["the"].is_content_word  # stopword
        assert tokens["pool"].is_content_word
        assert not tokens[","].is_content_word  # no letter
        assert not tokens["42"].is_content_word  # digits only

    @given(st.text(max_size=200))
    def test_lossless_offsets(self, text):
        tokens = tokenize(text)
        for t in tokens:
            assert text[t.span.start : t.span.end] == t.text
        # non-overlapping and sorted
        for a, b in zip(tokens, tokens[1:]):
            assert a.span.end <= b.span.start

    @given(st.text(max_size=200))
    def test_idempotent(self, text):
        assert tokenize(text) == tokenize(text)


class TestSplitSentences:
    def test_empty(self):
        assert split_sentences("") == []
        assert split_sentences("   ") == []

    def test_two_sentences(self):
        assert [(s.start, s.end) for s in split_sentences("Nice. Clean.")] == [
            (0, 5),
            (6, 12),
        ]

    def test_abbreviation(self):
        assert len(split_sentences("Mr. Smith left.")) == 1

    def test_lowercase_continuation(self):
        # next word not capitalized: no break
        assert len(split_sentences("It cost 5. dollars more.")) == 1

    def test_digit_starts_sentence(self):
        assert len(split_sentences("We loved it! 10 out of 10.")) == 2

    @given(st.text(max_size=300))
    def test_spans_cover_non_whitespace(self, text):
        spans = split_sentences(text)
        covered = set()
        for s in spans:
            assert 0 <= s.start < s.end <= len(text)
            covered.update(range(s.start, s.end))
        for i, ch in enumerate(text):
            if not ch.isspace():
                assert i in covered
        for a, b in zip(spans, spans[1:]):
            assert a.end <= b.start


class TestSpans:
    def test_invalid_span_rejected(self):
        with pytest.raises(ValueError):
            Span(3, 3)
        with pytest.raises(ValueError):
            Span(-1, 2)

    def test_merge_spans(self):
        merged = merge_spans([Span(7, 15), Span(3, 10)])
        assert merged == (Span(3, 15),)

    def test_merge_disjoint(self):
        assert merge_spans([Span(0, 2), Span(5, 8)]) == (Span(0, 2), Span(5, 8))


class TestValidateInstance:
    def test_well_formed(self, instance):
        assert validate_instance(instance) == []

    def test_highlight_out_of_bounds(self):
        inst = make_instance(
            alignments=(
                Alignment(
                    summary_sentence_index=0,
                    summary_spans=(Span(0, 5),),
                    highlight=Highlight(review_id="r0", spans=(Span(0, 10_000),)),
                    annotator_id="w1",
                ),
            )
        )
        report = validate_instance(inst)
        assert any("exceeds review length" in v.rule for v in report)
        assert any("highlight" in v.field.lower() for v in report)

    def test_bad_sentence_index(self):
        inst = make_instance(
            alignments=(
                Alignment(
                    summary_sentence_index=7,
                    summary_spans=(Span(0, 5),),
                    highlight=Highlight(review_id="r0", spans=(Span(0, 5),)),
                    annotator_id="w1",
                ),
            )
        )
        report = validate_instance(inst)
        assert any("sentence index 7" in v.rule for v in report)

    def test_merge_union_property(self):
        rng = random.Random(7)
        for _ in range(25):
            inst = random_instance(rng)
            assert merge_highlights(inst.alignments) == inst.highlights
            assert validate_instance(inst) == []

    def test_highlight_spans_nonempty_substrings(self):
        rng = random.Random(11)
        for _ in range(25):
            inst = random_instance(rng)
            by_id = {r.id: r for r in inst.review_set.reviews}
            for h in inst.highlights:
                for s in h.spans:
                    assert s.slice(by_id[h.review_id].text)


class TestInterchange:
    def test_round_trip(self, instance):
        doc = instance_to_json(instance)
        back = instance_from_json(doc)
        assert back.instance_id == instance.instance_id
        assert back.fused_text.text == instance.fused_text.text
        assert back.alignments == instance.alignments
        assert back.highlights == instance.highlights
        assert back.split == instance.split

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_round_trip_random(self, seed):
        inst = random_instance(random.Random(seed))
        back = instance_from_json(instance_to_json(inst))
        assert back.alignments == inst.alignments
        assert [r.text for r in back.review_set.reviews] == [
            r.text for r in inst.review_set.reviews
        ]
