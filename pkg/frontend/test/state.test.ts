import { describe, expect, it } from "vitest";

import { QuestionQueue, RatingForm } from "../src/state";
import type { QuestionItem } from "../src/types";

const q = (id: string): QuestionItem => ({
  question_id: id,
  sentence: `sentence ${id}`,
  question: `question ${id}?`,
});

describe("RatingForm", () => {
  it("disables submit until both verdicts are chosen", () => {
    const form = new RatingForm();
    expect(form.canSubmit()).toBe(false);
    form.setSyntax(1.0);
    expect(form.canSubmit()).toBe(false);
    form.setSemantics(0.5);
    expect(form.canSubmit()).toBe(true);
  });

  it("accepts only the three scale values", () => {
    const form = new RatingForm();
    for (const bad of [0.7, 2, -1, "1", null, undefined]) {
      expect(() => form.setSyntax(bad)).toThrow();
      expect(() => form.setSemantics(bad)).toThrow();
    }
    for (const good of [0.0, 0.5, 1.0]) {
      form.setSyntax(good);
      form.setSemantics(good);
    }
  });

  it("enables the correction box once any verdict is below correct", () => {
    const form = new RatingForm();
    expect(form.correctionEnabled()).toBe(false);
    form.setSyntax(1.0);
    form.setSemantics(1.0);
    expect(form.correctionEnabled()).toBe(false);
    form.setSemantics(0.5);
    expect(form.correctionEnabled()).toBe(true);
  });

  it("builds exact payloads", () => {
    const form = new RatingForm();
    form.setSyntax(0.5);
    form.setSemantics(1.0);
    form.correction = "Who was the king of Thailand?";
    expect(form.buildPayload("q1", "r1")).toEqual({
      question_id: "q1",
      rater_id: "r1",
      syntax: 0.5,
      semantics: 1.0,
      skipped: false,
      correction: "Who was the king of Thailand?",
    });
  });

  it("drops the correction when both verdicts are correct", () => {
    const form = new RatingForm();
    form.setSyntax(1.0);
    form.setSemantics(1.0);
    form.correction = "ignored";
    expect(form.buildPayload("q1", "r1").correction).toBeNull();
  });

  it("refuses to build a payload without both verdicts", () => {
    const form = new RatingForm();
    form.setSyntax(1.0);
    expect(() => form.buildPayload("q1", "r1")).toThrow();
  });

  it("emits no verdict keys on skip", () => {
    const form = new RatingForm();
    const payload = form.buildSkipPayload("q1", "r1");
    expect(payload).toEqual({
      question_id: "q1",
      rater_id: "r1",
      skipped: true,
      correction: null,
    });
    expect("syntax" in payload).toBe(false);
    expect("semantics" in payload).toBe(false);
  });
});

describe("QuestionQueue", () => {
  it("fills without duplicates", () => {
    const queue = new QuestionQueue();
    queue.fill([q("a"), q("b")]);
    queue.fill([q("b"), q("c")]);
    expect(queue.ids()).toEqual(["a", "b", "c"]);
  });

  it("removes a completed question immediately and forever", () => {
    const queue = new QuestionQueue();
    queue.fill([q("a"), q("b")]);
    queue.complete("a");
    expect(queue.ids()).toEqual(["b"]);
    queue.fill([q("a"), q("c")]);
    expect(queue.ids()).toEqual(["b", "c"]);
  });

  it("yields the head as current", () => {
    const queue = new QuestionQueue();
    expect(queue.current()).toBeNull();
    queue.fill([q("a"), q("b")]);
    expect(queue.current()?.question_id).toBe("a");
  });
});
