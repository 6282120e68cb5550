/** Session-view controller: pending selections, save-current-alignment, and
 * the single-in-flight-mutation rule. DOM-free so it can be tested directly;
 * a thin page layer wires it to real nodes and keyboard shortcuts. */

import { AnnotationClient, ApiError } from "./api.js";
import { AlignmentJson, SelectionRange, SessionSnapshot } from "./types.js";

export interface ControllerState {
  snapshot: SessionSnapshot;
  pendingSummary: SelectionRange[];
  pendingReview: SelectionRange[];
  /** Inline message for the annotator; cleared on the next action. */
  message: string;
  /** Controls are disabled while a mutation is in flight. */
  busy: boolean;
}

export class SessionController {
  state: ControllerState;

  constructor(
    private client: AnnotationClient,
    snapshot: SessionSnapshot,
    private workerId: string,
  ) {
    this.state = {
      snapshot,
      pendingSummary: [],
      pendingReview: [],
      message: "",
      busy: false,
    };
  }

  addSelection(range: SelectionRange): void {
    this.state.message = "";
    if (range.pane === "Summary") {
      this.state.pendingSummary.push(range);
    } else {
      this.state.pendingReview.push(range);
    }
  }

  /** Local validation: at least one range on each side, one review. */
  private pendingProblems(): string[] {
    const problems: string[] = [];
    if (this.state.pendingSummary.length === 0) {
      problems.push("select a summary span first");
    }
    if (this.state.pendingReview.length === 0) {
      problems.push("select the review content expressing it");
    }
    const reviewIds = new Set(this.state.pendingReview.map((r) => r.reviewId));
    if (reviewIds.size > 1) {
      problems.push("one alignment covers a single review");
    }
    return problems;
  }

  /** POSTs the pending alignment. Returns the server status, or null when
   * local validation failed (no request is made). On success, pending
   * selections are cleared; on a server error they are retained so the
   * annotator can adjust and retry. */
  async saveCurrentAlignment(aspectLabel?: string): Promise<string | null> {
    if (this.state.busy) return null;
    const problems = this.pendingProblems();
    if (problems.length > 0) {
      this.state.message = problems.join("; ");
      return null;
    }
    const reviewRanges = this.state.pendingReview
      .slice()
      .sort((a, b) => a.start - b.start);
    const alignment: AlignmentJson = {
      summary_sentence_index: this.state.snapshot.focused_sentence_index,
      summary_spans: this.state.pendingSummary.map((r) => [r.start, r.end]),
      review_id: reviewRanges[0].reviewId!,
      highlight_spans: reviewRanges.map((r) => [r.start, r.end]),
      aspect_label: aspectLabel ?? null,
      annotator_id: this.workerId,
    };
    this.state.busy = true;
    try {
      const result = await this.client.saveAlignment(
        this.state.snapshot.session_id,
        alignment,
      );
      this.state.snapshot = result.session;
      this.state.pendingSummary = [];
      this.state.pendingReview = [];
      this.state.message = result.status === "duplicate" ? "duplicate" : "saved";
      return result.status;
    } catch (err) {
      if (err instanceof ApiError) {
        this.state.message = `${err.errorType}: ${err.message}`;
        return null; // selections retained for adjustment
      }
      throw err;
    } finally {
      this.state.busy = false;
    }
  }

  async advance(step: "NextAspect" | "NextSentence" | "NextReview") {
    if (this.state.busy) return;
    this.state.busy = true;
    try {
      this.state.snapshot = await this.client.advance(
        this.state.snapshot.session_id,
        step,
      );
      this.state.pendingSummary = [];
      this.state.pendingReview = [];
    } finally {
      this.state.busy = false;
    }
  }
}
