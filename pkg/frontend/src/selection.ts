/** Bridges browser selections to raw-document character offsets.
 *
 * Rendered panes are sequences of text segments (sentence, token, and
 * highlight styling split the text into many nodes); every segment carries
 * metadata saying which pane it belongs to and where its first character
 * sits in the raw document. Offsets returned here always index the raw
 * text, so they survive any re-rendering.
 */

import { Pane, SelectionRange } from "./types.js";

export class SelectionOutsidePane extends Error {}

/** The metadata a rendered text node must expose (real DOM nodes carry it
 * via data-* attributes; tests construct these objects directly). */
export interface SegmentNode {
  pane: Pane;
  reviewId?: string;
  /** Raw-document offset of this node's first character. */
  docStart: number;
  text: string;
}

/** Browser-Selection-shaped input: anchor and focus positions. */
export interface SelectionLike {
  anchorNode: SegmentNode | null;
  anchorOffset: number;
  focusNode: SegmentNode | null;
  focusOffset: number;
}

function docOffset(node: SegmentNode, offset: number): number {
  if (offset < 0 || offset > node.text.length) {
    throw new SelectionOutsidePane(
      `offset ${offset} outside node of length ${node.text.length}`,
    );
  }
  return node.docStart + offset;
}

/** Maps a selection to raw-text ranges: one contiguous range per visually
 * contiguous selection, even when it crosses token-styling boundaries.
 * Empty (collapsed) selections yield []. */
export function selectionToOffsets(selection: SelectionLike): SelectionRange[] {
  const { anchorNode, focusNode } = selection;
  if (anchorNode === null || focusNode === null) {
    return [];
  }
  if (anchorNode.pane !== focusNode.pane) {
    throw new SelectionOutsidePane("selection crosses panes");
  }
  if (
    anchorNode.pane === "Review" &&
    anchorNode.reviewId !== focusNode.reviewId
  ) {
    throw new SelectionOutsidePane("selection crosses reviews");
  }
  const a = docOffset(anchorNode, selection.anchorOffset);
  const b = docOffset(focusNode, selection.focusOffset);
  if (a === b) {
    return []; // collapsed
  }
  const range: SelectionRange = {
    pane: anchorNode.pane,
    start: Math.min(a, b),
    end: Math.max(a, b),
  };
  if (anchorNode.pane === "Review") {
    range.reviewId = anchorNode.reviewId;
  }
  return [range];
}

/** Splits a pane's raw text into segment nodes at the given boundaries
 * (token/highlight edges), preserving docStart metadata. Rendering helper;
 * also what the selection tests build fixtures with. */
export function segmentText(
  pane: Pane,
  text: string,
  boundaries: number[],
  reviewId?: string,
): SegmentNode[] {
  const cuts = Array.from(new Set([0, ...boundaries, text.length])).sort(
    (x, y) => x - y,
  );
  const nodes: SegmentNode[] = [];
  for (let i = 0; i + 1 < cuts.length; i++) {
    const [start, end] = [cuts[i], cuts[i + 1]];
    if (start >= end || start < 0 || end > text.length) continue;
    nodes.push({ pane, reviewId, docStart: start, text: text.slice(start, end) });
  }
  return nodes;
}
