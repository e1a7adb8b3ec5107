/** Wire types for the evaluation service (see the service's four endpoints). */

/** The only verdict values that may ever appear on the wire. */
export type Verdict = 1.0 | 0.5 | 0.0;

export const VERDICTS: readonly Verdict[] = [1.0, 0.5, 0.0];

export const VERDICT_LABELS: Record<string, string> = {
  "1": "correct",
  "0.5": "partially correct",
  "0": "incorrect",
};

export interface QuestionItem {
  question_id: string;
  sentence: string;
  question: string;
}

/**
 * Body of POST /api/ratings.  A skipped rating carries no verdict keys at
 * all; a real rating carries both.
 */
export interface RatingPayload {
  question_id: string;
  rater_id: string;
  syntax?: Verdict;
  semantics?: Verdict;
  skipped: boolean;
  correction: string | null;
}

export interface RatingAck {
  status: string;
  effective_ratings: number;
}

export interface ReportRow {
  system: string;
  questions: number;
  ratings: number;
  avg_score: number;
  avg_syntax: number;
  avg_semantics: number;
  correct_ratings: number;
  correctness_pct: number;
}

export interface RuleStats {
  rule_id: number;
  application_count: number;
  success_sum: number;
  success_rate: number;
}

export interface ReportResponse {
  systems: ReportRow[];
  total: {
    system: string;
    questions: number;
    ratings: number;
    correct_ratings: number;
    correctness_pct: number;
  };
  rules: RuleStats[];
}

export interface HealthResponse {
  status: string;
  questions: number;
  ratings: number;
}

export function isVerdict(value: unknown): value is Verdict {
  return value === 1.0 || value === 0.5 || value === 0.0;
}
