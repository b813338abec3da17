#!/usr/bin/env python3
"""Regenerate data/checker_fixtures.jsonl from the hand-derived state tables.

Each entry records what the checker reports for one (theorem, tactic prefix)
pair over the shipped corpus. The goal states below were derived by hand from
the NNG4-style definitions (addition recurses on its second argument, rewrites
hit the leftmost-outermost match) and can be re-verified against a real
Lean + NNG4 installation with the integration test profile.

Run: python tools/build_checker_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from proof_tutor.checker import CheckResult, Status, write_fixture_file
from proof_tutor.model import COMPLETE_STATE, parse_proof_state

NU = "ℕ"  # ℕ
TS = "⊢"  # ⊢
ARROW = "→"  # →
NE = "≠"  # ≠
EXISTS = "∃"  # ∃
LARROW = "←"  # ←


def incomplete(goals: str) -> CheckResult:
    return CheckResult(status=Status.INCOMPLETE, goal_state=parse_proof_state(goals))


def complete() -> CheckResult:
    return CheckResult(status=Status.COMPLETE, goal_state=COMPLETE_STATE)


def error(message: str, position: tuple[int, int] | None = None) -> CheckResult:
    return CheckResult(status=Status.ERROR, message=message, error_position=position)


RFL_FAIL = (
    "tactic 'rfl' failed, the left-hand side\n  succ (a + d)\n"
    "is not definitionally equal to the right-hand side\n  succ (d + a)"
)

entries: list[tuple[str, list[str], CheckResult]] = []


def chain(theorem: str, tactics_and_states: list[tuple[str | None, CheckResult]]) -> None:
    """Record the result after every prefix of a tactic chain.

    The first element uses tactic None for the empty prefix.
    """
    prefix: list[str] = []
    for tactic, result in tactics_and_states:
        if tactic is not None:
            prefix.append(tactic)
        entries.append((theorem, list(prefix), result))


# -- add_zero ---------------------------------------------------------------

chain(
    "add_zero",
    [
        (None, incomplete(f"a : {NU}\n{TS} a + 0 = a")),
        ("rfl", complete()),
    ],
)
entries.append(
    ("add_zero", ["rw [nonexistent_thm]"], error("unknown identifier 'nonexistent_thm'", (2, 6)))
)

# -- zero_add ---------------------------------------------------------------

ZERO_ADD_SUCC = f"d : {NU}\nhd : 0 + d = d\n{TS} 0 + succ d = succ d"
chain(
    "zero_add",
    [
        (None, incomplete(f"n : {NU}\n{TS} 0 + n = n")),
        ("induction n with d hd", incomplete(f"{TS} 0 + 0 = 0\n\n{ZERO_ADD_SUCC}")),
        ("rw [add_zero]", incomplete(f"{TS} 0 = 0\n\n{ZERO_ADD_SUCC}")),
        ("rfl", incomplete(ZERO_ADD_SUCC)),
        ("rw [add_succ]", incomplete(f"d : {NU}\nhd : 0 + d = d\n{TS} succ (0 + d) = succ d")),
        ("rw [hd]", incomplete(f"d : {NU}\nhd : 0 + d = d\n{TS} succ d = succ d")),
        ("rfl", complete()),
    ],
)
# Same induction under different binder names, for renaming-invariance checks.
entries.append(
    (
        "zero_add",
        ["induction n with k hk"],
        incomplete(f"{TS} 0 + 0 = 0\n\nk : {NU}\nhk : 0 + k = k\n{TS} 0 + succ k = succ k"),
    )
)

# -- succ_add ---------------------------------------------------------------

SUCC_ADD_SUCC = (
    f"a d : {NU}\nhd : succ a + d = succ (a + d)\n{TS} succ a + succ d = succ (a + succ d)"
)
chain(
    "succ_add",
    [
        (None, incomplete(f"a b : {NU}\n{TS} succ a + b = succ (a + b)")),
        (
            "induction b with d hd",
            incomplete(f"a : {NU}\n{TS} succ a + 0 = succ (a + 0)\n\n{SUCC_ADD_SUCC}"),
        ),
        ("rw [add_zero]", incomplete(f"a : {NU}\n{TS} succ a = succ (a + 0)\n\n{SUCC_ADD_SUCC}")),
        ("rw [add_zero]", incomplete(f"a : {NU}\n{TS} succ a = succ a\n\n{SUCC_ADD_SUCC}")),
        ("rfl", incomplete(SUCC_ADD_SUCC)),
        (
            "rw [add_succ]",
            incomplete(
                f"a d : {NU}\nhd : succ a + d = succ (a + d)\n"
                f"{TS} succ (succ a + d) = succ (a + succ d)"
            ),
        ),
        (
            "rw [add_succ]",
            incomplete(
                f"a d : {NU}\nhd : succ a + d = succ (a + d)\n"
                f"{TS} succ (succ a + d) = succ (succ (a + d))"
            ),
        ),
        (
            "rw [hd]",
            incomplete(
                f"a d : {NU}\nhd : succ a + d = succ (a + d)\n"
                f"{TS} succ (succ (a + d)) = succ (succ (a + d))"
            ),
        ),
        ("rfl", complete()),
    ],
)

# -- add_comm ---------------------------------------------------------------

AC_HYPS = f"a d : {NU}\nhd : a + d = d + a"
AC_SUCC = f"{AC_HYPS}\n{TS} a + succ d = succ d + a"
AC_AFTER_INDUCTION = f"a : {NU}\n{TS} a + 0 = 0 + a\n\n{AC_SUCC}"

# Staff solution: base case simplifies the LHS first.
chain(
    "add_comm",
    [
        (None, incomplete(f"a b : {NU}\n{TS} a + b = b + a")),
        ("induction b with d hd", incomplete(AC_AFTER_INDUCTION)),
        ("rw [add_zero]", incomplete(f"a : {NU}\n{TS} a = 0 + a\n\n{AC_SUCC}")),
        ("rw [zero_add]", incomplete(f"a : {NU}\n{TS} a = a\n\n{AC_SUCC}")),
        ("rfl", incomplete(AC_SUCC)),
        ("rw [add_succ]", incomplete(f"{AC_HYPS}\n{TS} succ (a + d) = succ d + a")),
        ("rw [succ_add]", incomplete(f"{AC_HYPS}\n{TS} succ (a + d) = succ (d + a)")),
        ("rw [hd]", incomplete(f"{AC_HYPS}\n{TS} succ (d + a) = succ (d + a)")),
        ("rfl", complete()),
    ],
)

# Equation-based variant: base case simplifies the RHS first.
BASE_EQ = ["induction b with d hd", "rw [zero_add]", "rw [add_zero]", "rfl"]
chain(
    "add_comm",
    [
        (BASE_EQ[0], incomplete(AC_AFTER_INDUCTION)),
        (BASE_EQ[1], incomplete(f"a : {NU}\n{TS} a + 0 = a\n\n{AC_SUCC}")),
        (BASE_EQ[2], incomplete(f"a : {NU}\n{TS} a = a\n\n{AC_SUCC}")),
        (BASE_EQ[3], incomplete(AC_SUCC)),
        ("rw [add_succ]", incomplete(f"{AC_HYPS}\n{TS} succ (a + d) = succ d + a")),
        ("rw [succ_add]", incomplete(f"{AC_HYPS}\n{TS} succ (a + d) = succ (d + a)")),
        ("rw [hd]", incomplete(f"{AC_HYPS}\n{TS} succ (d + a) = succ (d + a)")),
        ("rfl", complete()),
    ],
)

# Explicit-argument spelling of the same base-case rewrite.
entries.append(
    (
        "add_comm",
        ["induction b with d hd", "rw [zero_add a]"],
        incomplete(f"a : {NU}\n{TS} a + 0 = a\n\n{AC_SUCC}"),
    )
)

# Justification-based variant: successor case rewrites the RHS first.
BASE_J = ["induction b with d hd", "rw [add_zero]", "rw [zero_add]", "rfl"]
chain(
    "add_comm",
    [
        (BASE_J[0], incomplete(AC_AFTER_INDUCTION)),
        (BASE_J[1], incomplete(f"a : {NU}\n{TS} a = 0 + a\n\n{AC_SUCC}")),
        (BASE_J[2], incomplete(f"a : {NU}\n{TS} a = a\n\n{AC_SUCC}")),
        (BASE_J[3], incomplete(AC_SUCC)),
        ("rw [succ_add]", incomplete(f"{AC_HYPS}\n{TS} a + succ d = succ (d + a)")),
        ("rw [add_succ]", incomplete(f"{AC_HYPS}\n{TS} succ (a + d) = succ (d + a)")),
        ("rw [hd]", incomplete(f"{AC_HYPS}\n{TS} succ (d + a) = succ (d + a)")),
        ("rfl", complete()),
    ],
)

# Inducting on the first variable instead of the second.
entries.append(
    (
        "add_comm",
        ["induction a with d hd"],
        incomplete(
            f"b : {NU}\n{TS} 0 + b = b + 0\n\n"
            f"b d : {NU}\nhd : d + b = b + d\n{TS} succ d + b = b + succ d"
        ),
    )
)

# The step-skipped justification proof: rfl fires before the inductive
# hypothesis was applied.
J_PREFIX = [*BASE_J, "rw [succ_add]", "rw [add_succ]"]
entries.append(("add_comm", [*J_PREFIX, "rfl"], error(RFL_FAIL, (8, 2))))

# Search fixtures around the halted justification proof.
entries.append(
    (
        "add_comm",
        [*J_PREFIX, "rw [nonexistent_thm]"],
        error("unknown identifier 'nonexistent_thm'", (8, 6)),
    )
)
entries.append(
    (
        "add_comm",
        [*J_PREFIX, "rw [hd]", f"nth_rewrite 1 [{LARROW} hd]"],
        incomplete(f"{AC_HYPS}\n{TS} succ (a + d) = succ (d + a)"),
    )
)

# -- eq_succ_of_ne_zero -------------------------------------------------------

ESNZ_SUCC = (
    f"d : {NU}\nhd : d {NE} 0 {ARROW} {EXISTS} n, d = succ n\n"
    f"ha : succ d {NE} 0\n{TS} {EXISTS} n, succ d = succ n"
)
chain(
    "eq_succ_of_ne_zero",
    [
        (None, incomplete(f"a : {NU}\nha : a {NE} 0\n{TS} {EXISTS} n, a = succ n")),
        (
            "induction a with d hd",
            incomplete(f"ha : 0 {NE} 0\n{TS} {EXISTS} n, 0 = succ n\n\n{ESNZ_SUCC}"),
        ),
        ("tauto", incomplete(ESNZ_SUCC)),
        (
            "use d",
            incomplete(
                f"d : {NU}\nhd : d {NE} 0 {ARROW} {EXISTS} n, d = succ n\n"
                f"ha : succ d {NE} 0\n{TS} succ d = succ d"
            ),
        ),
        ("rfl", complete()),
    ],
)
# The step-skipped variant applies `use d` while the base case is focused.
entries.append(
    (
        "eq_succ_of_ne_zero",
        ["induction a with d hd", "use d"],
        error("unknown identifier 'd'", (4, 6)),
    )
)


def main() -> None:
    out = Path(__file__).resolve().parents[1] / "src" / "proof_tutor" / "data" / "checker_fixtures.jsonl"
    deduped: dict[tuple[str, tuple[str, ...]], tuple[str, list[str], CheckResult]] = {}
    for theorem, tactics, result in entries:
        deduped[(theorem, tuple(tactics))] = (theorem, tactics, result)
    write_fixture_file(out, deduped.values())
    print(f"wrote {len(deduped)} fixture records to {out}")


if __name__ == "__main__":
    main()
