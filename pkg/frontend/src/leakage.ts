/**
 * Client-side leakage lint: defense in depth against formal names reaching
 * the student. The server already lints its feedback; this re-checks every
 * string the view would render in student mode.
 */

export interface LintFinding {
  text: string;
  token: string;
}

/** Tactic words that read as Lean jargon wherever they appear. */
export const LEAN_JARGON = [
  "rfl",
  "rw",
  "tauto",
  "intro",
  "intros",
  "simp",
  "nth_rewrite",
  "contrapose",
  "symm",
  "omega",
  "decide",
];

const WORD = /[A-Za-z_][A-Za-z0-9_']*/g;

export function lintTexts(texts: string[], formalNames: string[]): LintFinding[] {
  const banned = new Set([...formalNames, ...LEAN_JARGON]);
  const findings: LintFinding[] = [];
  for (const text of texts) {
    for (const match of text.matchAll(WORD)) {
      if (banned.has(match[0])) {
        findings.push({ text, token: match[0] });
      }
    }
    if (/\brw\s*\[/.test(text)) {
      findings.push({ text, token: "rw [" });
    }
  }
  return findings;
}
