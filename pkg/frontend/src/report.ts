/** Report screen helpers: column layout mirrors the report endpoint keys. */

import type { ReportResponse, ReportRow } from "./types";

export const REPORT_COLUMNS: readonly (keyof ReportRow)[] = [
  "system",
  "questions",
  "ratings",
  "avg_score",
  "avg_syntax",
  "avg_semantics",
  "correct_ratings",
  "correctness_pct",
];

export function formatCell(row: ReportRow, column: keyof ReportRow): string {
  const value = row[column];
  if (typeof value === "number") {
    return Number.isInteger(value) ? String(value) : value.toFixed(2);
  }
  return String(value);
}

/** Rows for rendering: one per system, plus the totals line. */
export function reportRows(report: ReportResponse): ReportRow[] {
  const total: ReportRow = {
    system: report.total.system,
    questions: report.total.questions,
    ratings: report.total.ratings,
    avg_score: NaN,
    avg_syntax: NaN,
    avg_semantics: NaN,
    correct_ratings: report.total.correct_ratings,
    correctness_pct: report.total.correctness_pct,
  };
  return [...report.systems, total];
}
