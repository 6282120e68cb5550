/** Likert judgment forms: 7-point faithfulness/coverage, 5-point
 * coherence/redundancy, each option carrying explicit criteria text. */

import { JudgmentRecordBody } from "./types.js";

export interface AxisSpec {
  axis: string;
  min: number;
  max: number;
  /** What the scale measures, shown as the form legend. */
  criteria: string;
  /** Anchor wording for the lowest and highest options. */
  anchors: { low: string; high: string };
}

export const JUDGMENT_AXES: AxisSpec[] = [
  {
    axis: "Faithfulness",
    min: 1,
    max: 7,
    criteria:
      "Is all the information in the passage stated or implied by the " +
      "highlighted review content, with minimal additions?",
    anchors: { low: "contradicts or invents content", high: "fully grounded" },
  },
  {
    axis: "Coverage",
    min: 1,
    max: 7,
    criteria:
      "Does the passage cover every highlight, explicitly or through " +
      "generalization or aggregation?",
    anchors: { low: "misses most highlights", high: "covers every highlight" },
  },
  {
    axis: "Coherence",
    min: 1,
    max: 5,
    criteria: "Does the passage read as one well-structured, fluent text?",
    anchors: { low: "disjointed", high: "reads naturally" },
  },
  {
    axis: "Redundancy",
    min: 1,
    max: 5,
    criteria: "Is the passage free of repeated content?",
    anchors: { low: "very repetitive", high: "no repetition" },
  },
];

export interface FormOption {
  value: number;
  label: string;
}

export interface JudgmentForm {
  axis: string;
  criteria: string;
  options: FormOption[];
}

/** One radio-group per axis; option counts follow the axis scale. */
export function buildJudgmentForms(
  axes: AxisSpec[] = JUDGMENT_AXES,
): JudgmentForm[] {
  return axes.map((spec) => ({
    axis: spec.axis,
    criteria: spec.criteria,
    options: Array.from({ length: spec.max - spec.min + 1 }, (_, i) => {
      const value = spec.min + i;
      let label = String(value);
      if (value === spec.min) label += ` — ${spec.anchors.low}`;
      if (value === spec.max) label += ` — ${spec.anchors.high}`;
      return { value, label };
    }),
  }));
}

export interface FormState {
  judgeId: string;
  instanceId: string;
  systemId: string;
  /** axis -> selected score. */
  scores: Record<string, number>;
}

/** Local validation before any request is made; returns human-readable
 * problems, empty when submittable. */
export function validateForm(
  state: FormState,
  axes: AxisSpec[] = JUDGMENT_AXES,
): string[] {
  const problems: string[] = [];
  if (!state.judgeId) problems.push("judge id is required");
  for (const spec of axes) {
    const score = state.scores[spec.axis];
    if (score === undefined) {
      problems.push(`${spec.axis}: no score selected`);
    } else if (score < spec.min || score > spec.max) {
      problems.push(
        `${spec.axis}: score ${score} outside ${spec.min}..${spec.max}`,
      );
    }
  }
  return problems;
}

/** One record per axis, ready for POST /judgments. Throws when local
 * validation fails so no partial submission can leave the client. */
export function toRecords(
  state: FormState,
  axes: AxisSpec[] = JUDGMENT_AXES,
): JudgmentRecordBody[] {
  const problems = validateForm(state, axes);
  if (problems.length > 0) {
    throw new Error(problems.join("; "));
  }
  return axes.map((spec) => ({
    judge_id: state.judgeId,
    instance_id: state.instanceId,
    system_id: state.systemId,
    axis: spec.axis,
    score: state.scores[spec.axis],
  }));
}
