/**
 * Rating screen state, kept free of DOM concerns so the invariants are
 * directly testable: submit needs both verdicts (or an explicit skip), only
 * the three scale values ever reach a payload, and a question leaves the
 * local queue the moment its rating is accepted.
 */

import { ApiError, type ApiClient } from "./api";
import { OfflineQueue } from "./queue";
import type { QuestionItem, RatingPayload, Verdict } from "./types";
import { isVerdict } from "./types";

export class RatingForm {
  syntax: Verdict | null = null;
  semantics: Verdict | null = null;
  correction = "";

  setSyntax(value: unknown): void {
    if (!isVerdict(value)) {
      throw new Error(`invalid syntax verdict: ${String(value)}`);
    }
    this.syntax = value;
  }

  setSemantics(value: unknown): void {
    if (!isVerdict(value)) {
      throw new Error(`invalid semantics verdict: ${String(value)}`);
    }
    this.semantics = value;
  }

  reset(): void {
    this.syntax = null;
    this.semantics = null;
    this.correction = "";
  }

  /** Submit is allowed only once both axes have a verdict. */
  canSubmit(): boolean {
    return this.syntax !== null && this.semantics !== null;
  }

  /** The correction box opens as soon as any axis is below "correct". */
  correctionEnabled(): boolean {
    return (
      (this.syntax !== null && this.syntax < 1.0) ||
      (this.semantics !== null && this.semantics < 1.0)
    );
  }

  buildPayload(questionId: string, raterId: string): RatingPayload {
    if (this.syntax === null || this.semantics === null) {
      throw new Error("both verdicts are required before submitting");
    }
    const correction = this.correctionEnabled() && this.correction.trim() !== ""
      ? this.correction
      : null;
    return {
      question_id: questionId,
      rater_id: raterId,
      syntax: this.syntax,
      semantics: this.semantics,
      skipped: false,
      correction,
    };
  }

  buildSkipPayload(questionId: string, raterId: string): RatingPayload {
    // deliberately no verdict keys at all
    return {
      question_id: questionId,
      rater_id: raterId,
      skipped: true,
      correction: null,
    };
  }
}

/** Local queue of questions waiting for this rater. */
export class QuestionQueue {
  private items: QuestionItem[] = [];
  private done = new Set<string>();

  get length(): number {
    return this.items.length;
  }

  ids(): string[] {
    return this.items.map((q) => q.question_id);
  }

  current(): QuestionItem | null {
    return this.items[0] ?? null;
  }

  fill(batch: QuestionItem[]): void {
    const present = new Set(this.ids());
    for (const item of batch) {
      if (!present.has(item.question_id) && !this.done.has(item.question_id)) {
        this.items.push(item);
        present.add(item.question_id);
      }
    }
  }

  complete(questionId: string): void {
    this.done.add(questionId);
    this.items = this.items.filter((q) => q.question_id !== questionId);
  }
}

export type ScreenStatus = "ok" | "offline" | "rejected" | "done";

export interface SubmitOutcome {
  status: ScreenStatus;
  detail?: string;
}

/** Controller behind the rating screen. */
export class RatingScreen {
  readonly form = new RatingForm();
  readonly queue = new QuestionQueue();
  readonly offline: OfflineQueue;
  online = true;

  constructor(
    private api: ApiClient,
    private raterId: string,
    private batchSize = 5,
    offlineQueue?: OfflineQueue,
  ) {
    this.offline = offlineQueue ?? new OfflineQueue();
  }

  /** Top up the local question queue from the service. */
  async refill(): Promise<void> {
    try {
      const batch = await this.api.getQuestions(this.raterId, this.batchSize);
      this.queue.fill(batch);
      this.online = true;
    } catch (err) {
      if (err instanceof ApiError) {
        throw err;
      }
      this.online = false;
    }
  }

  private async deliver(payload: RatingPayload): Promise<SubmitOutcome> {
    try {
      await this.api.postRating(payload);
      this.online = true;
      return { status: "ok" };
    } catch (err) {
      if (err instanceof ApiError) {
        return { status: "rejected", detail: err.message };
      }
      // network failure: keep the rating, retry later, move on
      this.offline.enqueue(payload);
      this.online = false;
      return { status: "offline" };
    }
  }

  /** Submit the current form; advances past the question unless rejected. */
  async submit(): Promise<SubmitOutcome> {
    const question = this.queue.current();
    if (question === null) {
      return { status: "done" };
    }
    const payload = this.form.buildPayload(question.question_id, this.raterId);
    const outcome = await this.deliver(payload);
    if (outcome.status !== "rejected") {
      this.queue.complete(question.question_id);
      this.form.reset();
    }
    return outcome;
  }

  async skip(): Promise<SubmitOutcome> {
    const question = this.queue.current();
    if (question === null) {
      return { status: "done" };
    }
    const payload = this.form.buildSkipPayload(question.question_id, this.raterId);
    const outcome = await this.deliver(payload);
    if (outcome.status !== "rejected") {
      this.queue.complete(question.question_id);
      this.form.reset();
    }
    return outcome;
  }

  /** Retry queued submissions (called on reconnect and after each refill). */
  async flushOffline(): Promise<number> {
    const result = await this.offline.flush((p) => this.api.postRating(p));
    if (result.remaining === 0 && result.sent > 0) {
      this.online = true;
    }
    return result.sent;
  }
}
