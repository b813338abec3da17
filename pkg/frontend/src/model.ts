/**
 * Session view model.
 *
 * The view is a pure function of what the service has said so far: replaying
 * a recorded transcript must produce exactly the view that live submissions
 * built up. All reducers return fresh objects; nothing here touches the DOM
 * or the network.
 */

import type {
  FeedbackPayload,
  StepOutcomePayload,
  TranscriptPayload,
} from "./types.js";

export interface StepView {
  nl: string;
  /** ok = accepted with goals left, complete = closed the proof, error = rejected */
  verdict: "ok" | "complete" | "error";
}

export interface FeedbackView {
  errorType: string;
  message: string;
  question: string;
  /** Bottom-out hint; rendered only after an explicit reveal. */
  informalization: string;
  revealed: boolean;
}

export interface SessionView {
  sessionId: string;
  theorem: string;
  statementNl: string;
  status: "in_progress" | "complete" | "halted";
  steps: StepView[];
  goalSummary: string | null;
  feedback: FeedbackView | null;
  /** Transport failure to surface with a retry affordance. */
  transportError: string | null;
  /** Submission in flight; the UI is turn-based and blocks until the verdict. */
  busy: boolean;
}

export function emptySession(
  sessionId: string,
  theorem: string,
  statementNl: string
): SessionView {
  return {
    sessionId,
    theorem,
    statementNl,
    status: "in_progress",
    steps: [],
    goalSummary: null,
    feedback: null,
    transportError: null,
    busy: false,
  };
}

function feedbackView(payload: FeedbackPayload): FeedbackView {
  return {
    errorType: payload.Type,
    message: payload.Message,
    question: payload.Question,
    informalization: payload.Informalization,
    revealed: false,
  };
}

/** Apply one step-submission response. */
export function applyStepOutcome(
  view: SessionView,
  outcome: StepOutcomePayload
): SessionView {
  const steps = [...view.steps, { nl: outcome.nl, verdict: outcome.verdict }];
  return {
    ...view,
    steps,
    status:
      outcome.verdict === "complete"
        ? "complete"
        : outcome.verdict === "error"
          ? "halted"
          : "in_progress",
    goalSummary: outcome.verdict === "ok" ? (outcome.goal_summary ?? null) : null,
    feedback: outcome.feedback ? feedbackView(outcome.feedback) : view.feedback,
    transportError: null,
    busy: false,
  };
}

/** Apply a hint response (cold start or mid-proof). */
export function applyHint(view: SessionView, payload: FeedbackPayload): SessionView {
  return { ...view, feedback: feedbackView(payload), transportError: null, busy: false };
}

export function applyTransportError(view: SessionView, message: string): SessionView {
  return { ...view, transportError: message, busy: false };
}

/** The explicit reveal control for the bottom-out hint. */
export function revealHint(view: SessionView): SessionView {
  if (!view.feedback) return view;
  return { ...view, feedback: { ...view.feedback, revealed: true } };
}

/** Hints are disabled once the proof is complete. */
export function hintAvailable(view: SessionView): boolean {
  return view.status !== "complete";
}

/**
 * Rebuild the view from a recorded transcript. Mirrors the live reducers:
 * each transcript step maps to the verdict the service reported for it, and
 * the most recent feedback bundle populates the panel (unrevealed).
 */
export function viewFromTranscript(transcript: TranscriptPayload): SessionView {
  let view = emptySession(
    transcript.session_id,
    transcript.theorem,
    transcript.statement_nl
  );
  for (const step of transcript.steps) {
    const verdict =
      step.status === "complete" ? "complete" : step.status === "error" ? "error" : "ok";
    view = { ...view, steps: [...view.steps, { nl: step.nl, verdict }] };
  }
  const last = transcript.feedback[transcript.feedback.length - 1];
  return {
    ...view,
    status: transcript.status,
    feedback: last ? feedbackView(last) : null,
  };
}

/**
 * Every string a student-mode render may contain. The bottom-out hint joins
 * only after the reveal; tactic text and search logs never do.
 */
export function studentVisibleText(view: SessionView): string[] {
  const texts = [view.statementNl, view.status];
  for (const step of view.steps) texts.push(step.nl);
  if (view.goalSummary) texts.push(view.goalSummary);
  if (view.feedback) {
    texts.push(view.feedback.errorType, view.feedback.message, view.feedback.question);
    if (view.feedback.revealed) texts.push(view.feedback.informalization);
  }
  if (view.transportError) texts.push(view.transportError);
  return texts;
}
