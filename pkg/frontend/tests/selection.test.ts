import { describe, expect, it } from "vitest";

import {
  SegmentNode,
  SelectionLike,
  SelectionOutsidePane,
  segmentText,
  selectionToOffsets,
} from "../src/selection.js";

const REVIEW_TEXT = "great pool";

function select(
  anchorNode: SegmentNode | null,
  anchorOffset: number,
  focusNode: SegmentNode | null,
  focusOffset: number,
): SelectionLike {
  return { anchorNode, anchorOffset, focusNode, focusOffset };
}

describe("selectionToOffsets", () => {
  it('maps selecting "pool" in "great pool" to Review range (6,10)', () => {
    const node: SegmentNode = {
      pane: "Review",
      reviewId: "r0",
      docStart: 0,
      text: REVIEW_TEXT,
    };
    const ranges = selectionToOffsets(select(node, 6, node, 10));
    expect(ranges).toEqual([
      { pane: "Review", reviewId: "r0", start: 6, end: 10 },
    ]);
  });

  it("returns [] for an empty (collapsed) selection", () => {
    const node: SegmentNode = {
      pane: "Summary",
      docStart: 0,
      text: "The pool.",
    };
    expect(selectionToOffsets(select(node, 3, node, 3))).toEqual([]);
    expect(selectionToOffsets(select(null, 0, null, 0))).toEqual([]);
  });

  it("yields one contiguous range across a bolded-token boundary", () => {
    // "great pool" rendered as ["great ", "pool"] with "pool" bolded.
    const [plain, bolded] = segmentText("Review", REVIEW_TEXT, [6], "r0");
    const ranges = selectionToOffsets(select(plain, 2, bolded, 4));
    expect(ranges).toEqual([
      { pane: "Review", reviewId: "r0", start: 2, end: 10 },
    ]);
  });

  it("normalizes a backwards (focus-before-anchor) selection", () => {
    const [plain, bolded] = segmentText("Review", REVIEW_TEXT, [6], "r0");
    const ranges = selectionToOffsets(select(bolded, 4, plain, 2));
    expect(ranges).toEqual([
      { pane: "Review", reviewId: "r0", start: 2, end: 10 },
    ]);
  });

  it("round-trips programmatic selections on a segmented fixture", () => {
    const text = "The pool was great. The rooms were clean.";
    const nodes = segmentText("Summary", text, [4, 8, 12, 19, 20, 24, 30]);
    for (let start = 0; start < text.length; start++) {
      for (const end of [start + 1, Math.min(start + 7, text.length)]) {
        if (end <= start || end > text.length) continue;
        const from = nodes.find(
          (n) => start >= n.docStart && start <= n.docStart + n.text.length,
        )!;
        const to = nodes.find(
          (n) => end >= n.docStart && end <= n.docStart + n.text.length,
        )!;
        const ranges = selectionToOffsets(
          select(from, start - from.docStart, to, end - to.docStart),
        );
        expect(ranges).toEqual([{ pane: "Summary", start, end }]);
      }
    }
  });

  it("rejects selections crossing panes", () => {
    const summary: SegmentNode = { pane: "Summary", docStart: 0, text: "A b." };
    const review: SegmentNode = {
      pane: "Review",
      reviewId: "r0",
      docStart: 0,
      text: "C d.",
    };
    expect(() => selectionToOffsets(select(summary, 0, review, 2))).toThrow(
      SelectionOutsidePane,
    );
  });

  it("rejects selections crossing reviews", () => {
    const r0: SegmentNode = { pane: "Review", reviewId: "r0", docStart: 0, text: "aa" };
    const r1: SegmentNode = { pane: "Review", reviewId: "r1", docStart: 0, text: "bb" };
    expect(() => selectionToOffsets(select(r0, 0, r1, 1))).toThrow(
      SelectionOutsidePane,
    );
  });

  it("rejects offsets outside the node", () => {
    const node: SegmentNode = { pane: "Summary", docStart: 0, text: "abc" };
    expect(() => selectionToOffsets(select(node, 0, node, 9))).toThrow(
      SelectionOutsidePane,
    );
  });
});
