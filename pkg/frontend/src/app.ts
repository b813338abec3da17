/**
 * Single-page wiring: theorem picker, turn-based step submission, hint and
 * reveal controls, and the instructor panel behind the ?instructor=1 flag.
 */

import { ServiceError, TutorClient } from "./api.js";
import {
  applyHint,
  applyStepOutcome,
  applyTransportError,
  emptySession,
  revealHint,
  studentVisibleText,
  type SessionView,
} from "./model.js";
import { lintTexts } from "./leakage.js";
import { renderInstructorPanel, renderSession, escapeHtml } from "./render.js";
import type { TheoremInfo } from "./types.js";

interface AppState {
  client: TutorClient;
  view: SessionView | null;
  theorems: TheoremInfo[];
  instructor: boolean;
  formalNames: string[];
  lastInput: string;
}

function assertNoLeakage(state: AppState): void {
  if (!state.view) return;
  const findings = lintTexts(studentVisibleText(state.view), state.formalNames);
  if (findings.length > 0) {
    // Defense in depth: scrub rather than show formal vocabulary.
    console.error("leakage lint findings", findings);
    if (state.view.feedback && !state.view.feedback.revealed) {
      state.view = {
        ...state.view,
        feedback: {
          ...state.view.feedback,
          message: "The tutor's note was withheld because it mentioned internal names.",
          question: "Can you look at the last goal again and describe what still differs?",
        },
      };
    }
  }
}

function paint(state: AppState, root: HTMLElement): void {
  if (!state.view) {
    const options = state.theorems
      .map(
        (t) =>
          `<li><button class="pick" data-theorem="${escapeHtml(t.name)}">` +
          `${escapeHtml(t.statement_nl || t.name)} <small>(${escapeHtml(t.world)})</small>` +
          "</button></li>"
      )
      .join("");
    root.innerHTML = `<main><h2>Pick a theorem</h2><ul class="theorems">${options}</ul></main>`;
    for (const button of root.querySelectorAll<HTMLButtonElement>("button.pick")) {
      button.addEventListener("click", () => {
        void startSession(state, root, button.dataset.theorem ?? "");
      });
    }
    return;
  }

  assertNoLeakage(state);
  root.innerHTML = renderSession(state.view);
  wireSessionHandlers(state, root);
  if (state.instructor) {
    void state.client
      .transcript(state.view.sessionId, true)
      .then((transcript) => {
        root.insertAdjacentHTML("beforeend", renderInstructorPanel(transcript));
      })
      .catch(() => undefined);
  }
}

async function startSession(state: AppState, root: HTMLElement, theorem: string): Promise<void> {
  const info = state.theorems.find((t) => t.name === theorem);
  try {
    const sessionId = await state.client.createSession(theorem);
    state.view = emptySession(sessionId, theorem, info?.statement_nl ?? "");
  } catch (err) {
    root.innerHTML = `<p class="transport-error">${escapeHtml(String(err))}</p>`;
    return;
  }
  paint(state, root);
}

function wireSessionHandlers(state: AppState, root: HTMLElement): void {
  const form = root.querySelector<HTMLFormElement>("#step-form");
  const input = root.querySelector<HTMLInputElement>("#step-input");
  if (input) input.value = state.lastInput;

  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    const nl = input?.value.trim() ?? "";
    if (!nl || !state.view || state.view.busy) return;
    state.lastInput = "";
    state.view = { ...state.view, busy: true };
    paint(state, root);
    void state.client
      .submitStep(state.view.sessionId, nl)
      .then((outcome) => {
        state.view = applyStepOutcome(state.view!, outcome);
      })
      .catch((err) => {
        state.lastInput = nl; // retry affordance keeps the student's text
        const message = err instanceof ServiceError ? err.message : String(err);
        state.view = applyTransportError(state.view!, message);
      })
      .finally(() => paint(state, root));
  });

  for (const helper of root.querySelectorAll<HTMLButtonElement>("button.helper")) {
    helper.addEventListener("click", () => {
      if (input) {
        input.value += helper.dataset.insert ?? "";
        input.focus();
      }
    });
  }

  root.querySelector("#hint")?.addEventListener("click", (event) => {
    event.preventDefault();
    if (!state.view || state.view.busy) return;
    state.view = { ...state.view, busy: true };
    paint(state, root);
    void state.client
      .requestHint(state.view.sessionId)
      .then((payload) => {
        state.view = applyHint(state.view!, payload);
      })
      .catch((err) => {
        const message = err instanceof ServiceError ? err.message : String(err);
        state.view = applyTransportError(state.view!, message);
      })
      .finally(() => paint(state, root));
  });

  root.querySelector("#reveal-hint")?.addEventListener("click", () => {
    if (!state.view) return;
    state.view = revealHint(state.view);
    paint(state, root);
  });

  root.querySelector("#retry")?.addEventListener("click", () => {
    if (!state.view) return;
    state.view = { ...state.view, transportError: null };
    paint(state, root);
  });
}

export async function boot(root: HTMLElement, baseUrl = ""): Promise<AppState> {
  const params = new URLSearchParams(window.location.search);
  const client = new TutorClient(baseUrl);
  const theorems = await client.listTheorems();
  const state: AppState = {
    client,
    view: null,
    theorems,
    instructor: params.get("instructor") === "1",
    // theorem names double as the formal vocabulary the lint must not see
    formalNames: theorems.map((t) => t.name),
    lastInput: "",
  };
  paint(state, root);
  return state;
}
