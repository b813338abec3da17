/**
 * Recorded service payloads: the add_comm session that halts on its final
 * step (mirrors the backend's justification-persona fixture flow) and a
 * one-step session that completes. Shapes match the session service exactly.
 */

import type {
  FeedbackPayload,
  StepOutcomePayload,
  TranscriptPayload,
} from "../src/types.js";

export const FEEDBACK: FeedbackPayload = {
  Type: "Failing to apply the inductive hypothesis",
  Message:
    "Your final line claims both sides already match, but the left side " +
    "still reads succ (a + d) while the right reads succ (d + a).",
  Question: "Which assumption from your induction lets you swap a + d for d + a?",
  Informalization:
    "The next step is to use the induction hypothesis to replace a + d " +
    "with d + a on the left-hand side.",
};

export const COLD_START_FEEDBACK: FeedbackPayload = {
  Type: "other",
  Message: "(no error: the student has not started this proof)",
  Question:
    "Could you make progress by checking a simple starting value first and " +
    "then assuming the statement for one number to prove it for the next?",
  Informalization:
    "The first step is to argue by induction on the second number, splitting " +
    "the proof into a zero case and a successor case.",
};

export const HALTED_NL_STEPS = [
  "Start by inducting on b",
  "We start with the base case using properties of addition by 0 we can rewrite a + 0 to a on the LHS",
  "using properties of addition by 0 we can rewrite 0 + a to a on the RHS",
  "since both sides are equal, we are done with the base case",
  "Now to the (n+1) step. using properties of successors, succ (n) + a -> succ (n + a) and substitute this into the RHS",
  "using properties of succession, we substitute a + succ(n) -> succ(a+n) on the RHS",
  "since both sides are equal, we are done with the proof",
];

export const HALTED_OUTCOMES: StepOutcomePayload[] = [
  ...HALTED_NL_STEPS.slice(0, 6).map(
    (nl, i): StepOutcomePayload => ({
      verdict: "ok",
      nl,
      goal_summary:
        i < 3
          ? "Goal 1 of 2: You need to show a = 0 + a. You may use: a : ℕ."
          : "You need to show succ (a + d) = succ (d + a). You may use: a d : ℕ; hd : a + d = d + a.",
    })
  ),
  { verdict: "error", nl: HALTED_NL_STEPS[6], feedback: FEEDBACK },
];

export const HALTED_TRANSCRIPT: TranscriptPayload = {
  session_id: "fixture-halted",
  theorem: "add_comm",
  statement_nl: "Prove that for all natural numbers a and b, a + b = b + a.",
  status: "halted",
  steps: [
    ...HALTED_NL_STEPS.slice(0, 6).map((nl) => ({ nl, status: "incomplete" as const })),
    { nl: HALTED_NL_STEPS[6], status: "error" as const },
  ],
  feedback: [FEEDBACK],
};

export const INSTRUCTOR_TRANSCRIPT: TranscriptPayload = {
  ...HALTED_TRANSCRIPT,
  trace: [
    {
      nl: HALTED_NL_STEPS[0],
      tactic: "induction b with d hd",
      result: { status: "incomplete", goals: "a : ℕ\n⊢ a + 0 = 0 + a" },
    },
    {
      nl: HALTED_NL_STEPS[6],
      tactic: "rfl",
      result: { status: "error", message: "tactic 'rfl' failed" },
    },
  ],
  search_log: ["0\tcompile-fail\trw [nonexistent_thm]", "0\texpanded\trw [hd]", "1\tcomplete\trfl"],
};

export const COMPLETE_TRANSCRIPT: TranscriptPayload = {
  session_id: "fixture-complete",
  theorem: "add_zero",
  statement_nl: "Prove that for any natural number a, a + 0 = a.",
  status: "complete",
  steps: [
    {
      nl: "Adding zero changes nothing, so both sides are already the same and we are done.",
      status: "complete",
    },
  ],
  feedback: [],
};

/** The formal vocabulary the student must never see. */
export const FORMAL_NAMES = [
  "add_zero",
  "add_succ",
  "zero_add",
  "succ_add",
  "add_comm",
  "add_assoc",
  "succ_inj",
  "zero_ne_succ",
  "eq_succ_of_ne_zero",
];
