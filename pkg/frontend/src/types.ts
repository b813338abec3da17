/** Wire types mirroring the session service's JSON bodies. */

export interface TheoremInfo {
  name: string;
  world: string;
  order_index: number;
  statement_nl: string;
}

/** The four-field feedback object, exactly as the service serializes it. */
export interface FeedbackPayload {
  Type: string;
  Message: string;
  Question: string;
  Informalization: string;
}

export type StepVerdict = "ok" | "complete" | "error";

export interface StepOutcomePayload {
  verdict: StepVerdict;
  nl: string;
  goal_summary?: string;
  feedback?: FeedbackPayload;
}

export interface TranscriptStep {
  nl: string;
  status: "incomplete" | "complete" | "error";
}

export interface InstructorTraceEntry {
  nl: string;
  tactic: string;
  result: { status: string; goals?: string; message?: string };
}

export interface TranscriptPayload {
  session_id: string;
  theorem: string;
  statement_nl: string;
  status: "in_progress" | "complete" | "halted";
  steps: TranscriptStep[];
  feedback: FeedbackPayload[];
  /** Present only when the instructor flag was set on the request. */
  trace?: InstructorTraceEntry[];
  search_log?: string[];
}
