import { describe, expect, it } from "vitest";

import {
  JUDGMENT_AXES,
  buildJudgmentForms,
  toRecords,
  validateForm,
} from "../src/judgment.js";

describe("buildJudgmentForms", () => {
  const forms = Object.fromEntries(
    buildJudgmentForms().map((f) => [f.axis, f]),
  );

  it("renders exactly 7 options for faithfulness and coverage", () => {
    expect(forms.Faithfulness.options.length).toBe(7);
    expect(forms.Coverage.options.length).toBe(7);
    expect(forms.Faithfulness.options.map((o) => o.value)).toEqual([
      1, 2, 3, 4, 5, 6, 7,
    ]);
  });

  it("renders exactly 5 options for coherence and redundancy", () => {
    expect(forms.Coherence.options.length).toBe(5);
    expect(forms.Redundancy.options.length).toBe(5);
  });

  it("shows criteria text and anchor wording", () => {
    for (const form of buildJudgmentForms()) {
      expect(form.criteria.length).toBeGreaterThan(0);
      expect(form.options[0].label).toContain("—");
      expect(form.options[form.options.length - 1].label).toContain("—");
    }
  });
});

describe("validateForm / toRecords", () => {
  const complete = {
    judgeId: "j1",
    instanceId: "inst-1",
    systemId: "sysA",
    scores: { Faithfulness: 7, Coverage: 5, Coherence: 4, Redundancy: 3 },
  };

  it("accepts a complete form and emits one record per axis", () => {
    expect(validateForm(complete)).toEqual([]);
    const records = toRecords(complete);
    expect(records.length).toBe(JUDGMENT_AXES.length);
    expect(records.find((r) => r.axis === "Faithfulness")).toEqual({
      judge_id: "j1",
      instance_id: "inst-1",
      system_id: "sysA",
      axis: "Faithfulness",
      score: 7,
    });
  });

  it("rejects a missing axis locally", () => {
    const missing = { ...complete, scores: { ...complete.scores } };
    delete (missing.scores as Record<string, number>).Coverage;
    expect(validateForm(missing)).toEqual(["Coverage: no score selected"]);
    expect(() => toRecords(missing)).toThrow(/Coverage/);
  });

  it("rejects out-of-range scores locally", () => {
    const bad = { ...complete, scores: { ...complete.scores, Coherence: 6 } };
    expect(validateForm(bad)).toEqual(["Coherence: score 6 outside 1..5"]);
  });

  it("requires a judge id", () => {
    expect(validateForm({ ...complete, judgeId: "" })).toContain(
      "judge id is required",
    );
  });
});
