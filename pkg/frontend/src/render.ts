/**
 * HTML rendering as pure string functions of the view model, so the
 * replay-determinism property is directly testable: equal views render to
 * byte-equal markup. Event wiring happens in app.ts after mounting.
 */

import type { SessionView } from "./model.js";
import { hintAvailable } from "./model.js";
import type { TranscriptPayload } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const VERDICT_MARKS = { ok: "✓", complete: "✓", error: "✗" } as const;

function renderSteps(view: SessionView): string {
  if (view.steps.length === 0) {
    return '<p class="empty">No steps yet. Write your first step below, or ask for a hint.</p>';
  }
  const items = view.steps
    .map(
      (step) =>
        `<li class="step step-${step.verdict}">` +
        `<span class="mark">${VERDICT_MARKS[step.verdict]}</span> ` +
        `${escapeHtml(step.nl)}</li>`
    )
    .join("");
  return `<ol class="steps">${items}</ol>`;
}

function renderFeedback(view: SessionView): string {
  const feedback = view.feedback;
  if (!feedback) return "";
  const hint = feedback.revealed
    ? `<p class="bottom-out">${escapeHtml(feedback.informalization)}</p>`
    : '<button id="reveal-hint" class="reveal">Show me the next step</button>';
  return (
    '<section class="feedback">' +
    `<p class="error-type">${escapeHtml(feedback.errorType)}</p>` +
    `<p class="message">${escapeHtml(feedback.message)}</p>` +
    `<p class="question">${escapeHtml(feedback.question)}</p>` +
    hint +
    "</section>"
  );
}

function renderStatus(view: SessionView): string {
  const labels = {
    in_progress: "In progress",
    complete: "Proof complete ✓",
    halted: "Needs attention",
  } as const;
  return `<span class="badge badge-${view.status}">${labels[view.status]}</span>`;
}

export function renderSession(view: SessionView): string {
  const goal = view.goalSummary
    ? `<p class="goal-summary">${escapeHtml(view.goalSummary)}</p>`
    : "";
  const transport = view.transportError
    ? `<div class="transport-error">${escapeHtml(view.transportError)} ` +
      '<button id="retry">Retry</button></div>'
    : "";
  const hintButton = hintAvailable(view)
    ? `<button id="hint"${view.busy ? " disabled" : ""}>Hint</button>`
    : '<button id="hint" disabled>Hint</button>';
  const celebration =
    view.status === "complete"
      ? '<p class="celebrate">You finished the proof. Well done!</p>'
      : "";
  return (
    '<main class="session">' +
    `<h2>${escapeHtml(view.statementNl || view.theorem)}</h2>` +
    renderStatus(view) +
    renderSteps(view) +
    goal +
    renderFeedback(view) +
    celebration +
    transport +
    '<form id="step-form">' +
    `<input id="step-input" type="text" autocomplete="off"${view.busy || view.status !== "in_progress" ? " disabled" : ""}>` +
    '<span class="unicode-helpers">' +
    '<button type="button" class="helper" data-insert="⊢">⊢</button>' +
    '<button type="button" class="helper" data-insert="ℕ">ℕ</button>' +
    '<button type="button" class="helper" data-insert="succ">succ</button>' +
    "</span>" +
    `<button id="submit" type="submit"${view.busy || view.status !== "in_progress" ? " disabled" : ""}>Submit step</button>` +
    hintButton +
    "</form>" +
    "</main>"
  );
}

/** Instructor-only evidence view: formalization trace and search log. */
export function renderInstructorPanel(transcript: TranscriptPayload): string {
  const trace = (transcript.trace ?? [])
    .map(
      (entry) =>
        `<tr><td>${escapeHtml(entry.nl)}</td><td><code>${escapeHtml(entry.tactic)}</code></td>` +
        `<td>${escapeHtml(entry.result.status)}</td></tr>`
    )
    .join("");
  const log = (transcript.search_log ?? [])
    .map((line) => `<li><code>${escapeHtml(line)}</code></li>`)
    .join("");
  return (
    '<aside class="instructor">' +
    "<h3>Formalization trace</h3>" +
    `<table><thead><tr><th>step</th><th>tactic</th><th>status</th></tr></thead><tbody>${trace}</tbody></table>` +
    "<h3>Search log</h3>" +
    `<ul>${log}</ul>` +
    "</aside>"
  );
}
