/** Pure view-model computation for the focused annotation view.
 *
 * Rendering is additive markup over the immutable raw texts: the functions
 * here never change a document string, they only compute styled spans that
 * a thin DOM layer paints.
 */

import { PairTexts, SessionSnapshot } from "./types.js";

export interface StyledSpan {
  start: number;
  end: number;
  /** CSS-ish class names, e.g. "focused", "bold", "highlight". */
  styles: string[];
}

export interface SummaryPaneModel {
  text: string;
  sentences: { start: number; end: number; focused: boolean }[];
  /** Persistent highlights from saved alignments (summary side). */
  highlights: StyledSpan[];
}

export interface ReviewPaneModel {
  reviewId: string;
  text: string;
  current: boolean;
  /** Emboldened token spans (backend-supplied indices resolved to offsets). */
  bold: StyledSpan[];
  /** Persistent highlights from saved alignments (review side). */
  highlights: StyledSpan[];
}

export interface FocusedView {
  summary: SummaryPaneModel;
  reviews: ReviewPaneModel[];
}

/** Display-only sentence segmentation: split after .!? runs followed by
 * whitespace and an uppercase letter or digit. The backend owns the
 * canonical segmentation; this mirrors it closely enough for focus styling. */
export function splitSentences(text: string): { start: number; end: number }[] {
  const out: { start: number; end: number }[] = [];
  let start = 0;
  const re = /[.!?]+(\s+)(?=[A-Z0-9])/g;
  let m: RegExpExecArray | null;
  while ((m = re.exec(text)) !== null) {
    const end = m.index + m[0].length - m[1].length;
    out.push({ start, end });
    start = m.index + m[0].length;
  }
  if (start < text.length) {
    out.push({ start, end: text.length });
  }
  return out;
}

/** Token spans (letters/digits runs, apostrophes inside words, punctuation
 * runs) — used to resolve emboldened token indices to character offsets. */
export function tokenSpans(text: string): { start: number; end: number }[] {
  const out: { start: number; end: number }[] = [];
  const re = /[^\W_]+(?:'[^\W_]+)*|[^\w\s]+|_+/gu;
  let m: RegExpExecArray | null;
  while ((m = re.exec(text)) !== null) {
    out.push({ start: m.index, end: m.index + m[0].length });
  }
  return out;
}

/** Builds the side-by-side view for a session snapshot: focused sentence
 * marked, emboldened tokens styled, saved alignments shown as persistent
 * highlights. */
export function renderFocusedView(
  snapshot: SessionSnapshot,
  texts: PairTexts,
  emboldenedTokenIndices: number[],
): FocusedView {
  const sentences = splitSentences(texts.summary).map((s, i) => ({
    ...s,
    focused: i === snapshot.focused_sentence_index,
  }));

  const summaryHighlights: StyledSpan[] = snapshot.saved_alignments.flatMap(
    (a) =>
      a.summary_spans.map(([start, end]) => ({
        start,
        end,
        styles: ["highlight"],
      })),
  );

  const reviews = texts.reviews.map((review, index) => {
    const current = index === snapshot.current_review_index;
    const spans = tokenSpans(review.text);
    const bold: StyledSpan[] = current
      ? emboldenedTokenIndices
          .filter((i) => i >= 0 && i < spans.length)
          .map((i) => ({ ...spans[i], styles: ["bold"] }))
      : [];
    const highlights: StyledSpan[] = snapshot.saved_alignments
      .filter((a) => a.review_id === review.id)
      .flatMap((a) =>
        a.highlight_spans.map(([start, end]) => ({
          start,
          end,
          styles: ["highlight"],
        })),
      );
    return { reviewId: review.id, text: review.text, current, bold, highlights };
  });

  return {
    summary: { text: texts.summary, sentences, highlights: summaryHighlights },
    reviews,
  };
}
