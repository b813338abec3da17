"""Batch evaluation of the autoformalizer with binomial error bars.

Tactic-level accuracy counts, over every ground-truth tactic, the positions
where the prediction matches under relaxed exact matching. Proof-level
accuracy demands every position match in order. Incorrect proofs succeed when
the faithful prefix is matched and the formalized incorrect step draws a
compiler error. Intervals use the Jeffreys prior at 95% coverage.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from scipy.stats import beta as beta_dist

from .autoformalize import (
    FormalizationTrace,
    FormalizeOptions,
    formalize_step_by_step,
    formalize_whole_proof,
)
from .checker import BackendUnavailable, CheckRequest, Status
from .llm import BackendError, LLMBackend
from .matching import (
    MatchVerdict,
    ProofScore,
    score_correct_proof,
    score_incorrect_proof,
    truncate_for_alignment,
)
from .model import AnnotatedProof, Label


@dataclass(frozen=True)
class Interval:
    low: float
    high: float
    confidence: float = 0.95


def jeffreys_interval(successes: int, total: int, confidence: float = 0.95) -> Interval:
    """Equal-tailed Jeffreys interval: Beta(k + 1/2, n - k + 1/2) quantiles.

    The lower bound is pinned to 0 when there are no successes and the upper
    bound to 1 when there are no failures, per the standard boundary rule.
    """
    if total <= 0:
        raise ValueError("total must be positive")
    if not 0 <= successes <= total:
        raise ValueError("successes must lie in [0, total]")
    tail = (1.0 - confidence) / 2.0
    a = successes + 0.5
    b = total - successes + 0.5
    low = 0.0 if successes == 0 else float(beta_dist.ppf(tail, a, b))
    high = 1.0 if successes == total else float(beta_dist.ppf(1.0 - tail, a, b))
    return Interval(low=low, high=high, confidence=confidence)


def format_rate(successes: int, total: int) -> str:
    return f"{successes} / {total} = {100.0 * successes / total:.2f}%"


@dataclass
class TacticVerdictRecord:
    theorem: str
    index: int
    phase: str
    matched: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "theorem": self.theorem,
                "index": self.index,
                "phase": self.phase,
                "matched": self.matched,
            },
            ensure_ascii=False,
        )


def write_verdict_log(path: Path | str, records: Sequence[TacticVerdictRecord]) -> None:
    Path(path).write_text(
        "".join(record.to_json() + "\n" for record in records), encoding="utf-8"
    )


@dataclass
class CorrectEvalReport:
    mode: str
    tactic_hits: int = 0
    tactic_total: int = 0
    proof_exact: int = 0
    proofs_scored: int = 0
    proofs_skipped: int = 0
    compiling_whole_proofs: int = 0
    verdicts: list[TacticVerdictRecord] = field(default_factory=list)

    @property
    def tactic_interval(self) -> Interval:
        return jeffreys_interval(self.tactic_hits, self.tactic_total)

    @property
    def proof_interval(self) -> Interval:
        return jeffreys_interval(self.proof_exact, self.proofs_scored)

    def summary_lines(self) -> list[str]:
        lines = [
            f"mode: {self.mode}",
            f"correct tactics: {format_rate(self.tactic_hits, self.tactic_total)}"
            f"  (95% CI {self.tactic_interval.low:.4f}..{self.tactic_interval.high:.4f})",
            f"correct proofs: {format_rate(self.proof_exact, self.proofs_scored)}"
            f"  (95% CI {self.proof_interval.low:.4f}..{self.proof_interval.high:.4f})",
        ]
        if self.mode == "whole":
            lines.append(f"compiling whole proofs: {self.compiling_whole_proofs}")
        if self.proofs_skipped:
            lines.append(f"proofs skipped (backend unavailable): {self.proofs_skipped}")
        return lines


@dataclass
class IncorrectEvalReport:
    mode: str
    successes: int = 0
    proofs_scored: int = 0
    proofs_skipped: int = 0

    @property
    def interval(self) -> Interval:
        return jeffreys_interval(self.successes, self.proofs_scored)

    def summary_lines(self) -> list[str]:
        return [
            f"mode: {self.mode}",
            f"incorrect proofs: {format_rate(self.successes, self.proofs_scored)}"
            f"  (95% CI {self.interval.low:.4f}..{self.interval.high:.4f})",
        ] + (
            [f"proofs skipped (backend unavailable): {self.proofs_skipped}"]
            if self.proofs_skipped
            else []
        )


def _verdict_records(theorem: str, verdicts: Sequence[MatchVerdict]) -> list[TacticVerdictRecord]:
    return [
        TacticVerdictRecord(
            theorem=theorem, index=i + 1, phase=v.phase.value, matched=v.matched
        )
        for i, v in enumerate(verdicts)
    ]


def _predict(
    proof: AnnotatedProof,
    mode: str,
    llm: LLMBackend,
    checker,
    opts_for: Callable[[AnnotatedProof], FormalizeOptions],
) -> list[str]:
    opts = opts_for(proof)
    if mode == "step":
        trace: FormalizationTrace = formalize_step_by_step(
            proof.nl_steps, proof.theorem, llm, checker, opts
        )
        return list(trace.accepted_tactics)
    if mode == "whole":
        generated = formalize_whole_proof(proof.nl_steps, proof.theorem, llm, opts)
        return truncate_for_alignment(generated, len(proof.steps))
    raise ValueError(f"unknown mode {mode!r}")


def evaluate_correct_proofs(
    proofs: Sequence[AnnotatedProof],
    mode: str,
    llm: LLMBackend,
    checker,
    opts_for: Callable[[AnnotatedProof], FormalizeOptions],
) -> CorrectEvalReport:
    report = CorrectEvalReport(mode=mode)
    for proof in proofs:
        if proof.label is not Label.CORRECT:
            continue
        try:
            pred = _predict(proof, mode, llm, checker, opts_for)
            score: ProofScore = score_correct_proof(pred, proof, checker)
            if mode == "whole":
                full = checker.check(
                    CheckRequest(
                        theorem_header=proof.theorem.statement_fl, tactics=tuple(pred)
                    )
                )
                if full.status is Status.COMPLETE:
                    report.compiling_whole_proofs += 1
        except (BackendUnavailable, BackendError):
            report.proofs_skipped += 1
            report.tactic_total += len(proof.steps)
            continue
        report.tactic_hits += score.tactic_hits
        report.tactic_total += len(proof.steps)
        report.proof_exact += int(score.proof_exact)
        report.proofs_scored += 1
        report.verdicts.extend(_verdict_records(proof.theorem.name, score.verdicts))
    return report


def evaluate_incorrect_proofs(
    proofs: Sequence[AnnotatedProof],
    mode: str,
    llm: LLMBackend,
    checker,
    opts_for: Callable[[AnnotatedProof], FormalizeOptions],
) -> IncorrectEvalReport:
    report = IncorrectEvalReport(mode=mode)
    for proof in proofs:
        if proof.label is not Label.INCORRECT:
            continue
        try:
            pred = _predict(proof, mode, llm, checker, opts_for)
            success = score_incorrect_proof(pred, proof, checker)
        except (BackendUnavailable, BackendError):
            report.proofs_skipped += 1
            continue
        report.successes += int(success)
        report.proofs_scored += 1
    return report
