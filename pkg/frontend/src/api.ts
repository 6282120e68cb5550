/** Typed client for the annotation-service HTTP API. The fetch function is
 * injectable so tests run against a scripted transport. */

import {
  AlignmentJson,
  ApiErrorBody,
  JudgmentRecordBody,
  SessionSnapshot,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorType: string,
    detail: string,
  ) {
    super(detail);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class AnnotationClient {
  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = fetch,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      const err = payload as ApiErrorBody;
      throw new ApiError(response.status, err.error ?? "Unknown", err.detail ?? "");
    }
    return payload as T;
  }

  createWorker(workerId: string) {
    return this.request<{ worker_id: string }>("POST", "/workers", {
      worker_id: workerId,
    });
  }

  advanceQualification(workerId: string, passed: boolean, note = "") {
    return this.request<Record<string, unknown>>(
      "POST",
      `/workers/${workerId}/qualification`,
      { passed, reviewer_note: note },
    );
  }

  completeTutorial(workerId: string) {
    return this.request<Record<string, unknown>>(
      "POST",
      `/workers/${workerId}/qualification`,
      { tutorial_completed: true },
    );
  }

  startSession(workerId: string, reviewSetId: string, summaryId: string) {
    return this.request<SessionSnapshot>("POST", "/sessions", {
      worker_id: workerId,
      review_set_id: reviewSetId,
      summary_id: summaryId,
    });
  }

  getSession(sessionId: string) {
    return this.request<SessionSnapshot>("GET", `/sessions/${sessionId}`);
  }

  embolden(sessionId: string, reviewIndex: number) {
    return this.request<{ token_indices: number[] }>(
      "GET",
      `/sessions/${sessionId}/embolden?review=${reviewIndex}`,
    );
  }

  saveAlignment(sessionId: string, alignment: AlignmentJson) {
    return this.request<{ status: "saved" | "duplicate"; session: SessionSnapshot }>(
      "POST",
      `/sessions/${sessionId}/alignments`,
      alignment,
    );
  }

  advance(sessionId: string, step: "NextAspect" | "NextSentence" | "NextReview") {
    return this.request<SessionSnapshot>("POST", `/sessions/${sessionId}/advance`, {
      step,
    });
  }

  submit(sessionId: string) {
    return this.request<{
      session_id: string;
      status: string;
      unaligned_sentences: number[];
    }>("POST", `/sessions/${sessionId}/submit`);
  }

  recordJudgment(record: JudgmentRecordBody) {
    return this.request<{ id: string }>("POST", "/judgments", record);
  }

  aggregateJudgments(instanceId: string, systemId: string, axis: string) {
    const query = new URLSearchParams({
      instance_id: instanceId,
      system_id: systemId,
      axis,
    });
    return this.request<{ mean: number; judges: number }>(
      "GET",
      `/judgments/aggregate?${query}`,
    );
  }
}
