/** Shared domain types mirroring the annotation-service JSON forms. */

export type Pane = "Summary" | "Review";

/** A character range against the raw document text (never rendered markup). */
export interface SelectionRange {
  pane: Pane;
  /** For Review ranges: which review the offsets index. */
  reviewId?: string;
  start: number;
  end: number;
}

export interface AlignmentJson {
  summary_sentence_index: number;
  summary_spans: [number, number][];
  review_id: string;
  highlight_spans: [number, number][];
  aspect_label?: string | null;
  annotator_id: string;
}

/** GET /sessions/{id} response body. */
export interface SessionSnapshot {
  session_id: string;
  worker_id: string;
  review_set_id: string;
  summary_id: string;
  current_review_index: number;
  focused_sentence_index: number;
  status: "Open" | "Submitted" | "Reviewed";
  ready_to_submit: boolean;
  saved_alignments: AlignmentJson[];
}

/** Raw texts for the displayed pair, supplied by the host page. */
export interface PairTexts {
  summary: string;
  reviews: { id: string; text: string }[];
}

export interface JudgmentRecordBody {
  judge_id: string;
  instance_id: string;
  system_id: string;
  axis: string;
  score: number;
}

export interface ApiErrorBody {
  error: string;
  detail: string;
}
