from __future__ import annotations

import json

import mpmath
import pytest

from proof_tutor.autoformalize import FormalizeOptions
from proof_tutor.checker import FixtureChecker
from proof_tutor.evaluation import (
    TacticVerdictRecord,
    evaluate_correct_proofs,
    evaluate_incorrect_proofs,
    format_rate,
    jeffreys_interval,
    write_verdict_log,
)
from proof_tutor.llm import ScriptedBackend
from proof_tutor.model import Label, Persona

from .conftest import proof_by


def beta_quantile_oracle(p: float, a: float, b: float) -> float:
    """Invert the Beta cdf by bisection over mpmath's incomplete beta."""
    mpmath.mp.dps = 40
    lo, hi = mpmath.mpf(0), mpmath.mpf(1)
    for _ in range(80):
        mid = (lo + hi) / 2
        if mpmath.betainc(a, b, 0, mid, regularized=True) < p:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def test_oracle_cdf_agrees_with_raw_quadrature():
    # Anchor the oracle itself: mpmath's incomplete beta must equal a direct
    # numerical integration of the density.
    mpmath.mp.dps = 40
    a, b = 10.5, 140.5
    density = lambda t: t ** (a - 1) * (1 - t) ** (b - 1)
    norm = mpmath.quad(density, [0, (a - 1) / (a + b - 2), 1])
    x = mpmath.mpf("0.1")
    by_quadrature = mpmath.quad(density, [0, x]) / norm
    by_betainc = mpmath.betainc(a, b, 0, x, regularized=True)
    assert abs(by_quadrature - by_betainc) < mpmath.mpf("1e-25")


@pytest.mark.parametrize("successes,total", [(296, 900), (511, 900), (10, 150)])
def test_jeffreys_matches_quantile_oracle(successes, total):
    interval = jeffreys_interval(successes, total)
    a, b = successes + 0.5, total - successes + 0.5
    assert abs(interval.low - beta_quantile_oracle(0.025, a, b)) < 1e-9
    assert abs(interval.high - beta_quantile_oracle(0.975, a, b)) < 1e-9


def test_jeffreys_zero_successes_lower_bound_is_zero():
    interval = jeffreys_interval(0, 25)
    assert interval.low == 0.0
    assert 0 < interval.high < 1


def test_jeffreys_all_successes_upper_bound_is_one():
    interval = jeffreys_interval(25, 25)
    assert interval.high == 1.0
    assert 0 < interval.low < 1


def test_jeffreys_rejects_bad_counts():
    with pytest.raises(ValueError):
        jeffreys_interval(1, 0)
    with pytest.raises(ValueError):
        jeffreys_interval(5, 3)


def test_reported_rate_formatting():
    assert format_rate(296, 900) == "296 / 900 = 32.89%"
    assert format_rate(511, 900) == "511 / 900 = 56.78%"


def test_verdict_log_is_jsonl(tmp_path):
    records = [
        TacticVerdictRecord(theorem="add_comm", index=1, phase="string", matched=True),
        TacticVerdictRecord(theorem="add_comm", index=2, phase="none", matched=False),
    ]
    path = tmp_path / "log.jsonl"
    write_verdict_log(path, records)
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[0]) == {
        "theorem": "add_comm",
        "index": 1,
        "phase": "string",
        "matched": True,
    }


# -- batch evaluation --------------------------------------------------------


def _opts_factory(dictionaries, corpus):
    theorems, tactics = dictionaries
    staff = {
        p.theorem.name: p
        for p in corpus
        if p.persona is Persona.STAFF_SOLUTION and p.label is Label.CORRECT
    }

    def opts_for(proof):
        return FormalizeOptions(
            theorem_dict=theorems,
            tactic_dict=tactics,
            staff_solution=staff.get(proof.theorem.name),
        )

    return opts_for


def _truth_responder(corpus, mode: str):
    """Backend that answers every prompt with the ground-truth formalization."""
    proofs = [p for p in corpus]

    def responder(bundle):
        for proof in proofs:
            for step in proof.steps:
                if bundle.user.endswith(step.nl) and proof.theorem.statement_fl in bundle.system:
                    if mode == "step":
                        return step.tactic
            if mode == "whole" and bundle.user.endswith("\n".join(p.nl for p in proof.steps)):
                return "\n".join(p.tactic for p in proof.steps)
        raise AssertionError("no scripted answer for prompt")

    return responder


def test_perfect_predictions_score_one_hundred_percent(corpus, dictionaries, fixture_checker):
    correct = [p for p in corpus if p.label is Label.CORRECT]
    llm = ScriptedBackend(responder=_truth_responder(corpus, "step"))
    report = evaluate_correct_proofs(
        correct, "step", llm, fixture_checker, _opts_factory(dictionaries, corpus)
    )
    assert report.proofs_scored == len(correct)
    assert report.tactic_hits == report.tactic_total == sum(len(p.steps) for p in correct)
    assert report.proof_exact == len(correct)
    assert report.proofs_skipped == 0


def test_incorrect_evaluation_counts_successes(corpus, dictionaries, fixture_checker):
    incorrect = [p for p in corpus if p.label is Label.INCORRECT]
    llm = ScriptedBackend(responder=_truth_responder(corpus, "step"))
    report = evaluate_incorrect_proofs(
        incorrect, "step", llm, fixture_checker, _opts_factory(dictionaries, corpus)
    )
    assert report.proofs_scored == len(incorrect) == 2
    assert report.successes == 2


def test_backend_unavailable_reports_partial_coverage(corpus, dictionaries):
    correct = [p for p in corpus if p.label is Label.CORRECT]
    llm = ScriptedBackend(responder=_truth_responder(corpus, "step"))
    empty_checker = FixtureChecker()  # every check raises BackendUnavailable
    report = evaluate_correct_proofs(
        correct, "step", llm, empty_checker, _opts_factory(dictionaries, corpus)
    )
    assert report.proofs_scored == 0
    assert report.proofs_skipped == len(correct)


def test_whole_mode_flags_compiling_proofs(corpus, dictionaries, fixture_checker):
    target = [proof_by(corpus, "add_comm", Persona.EQUATION_BASED)]
    llm = ScriptedBackend(responder=_truth_responder(corpus, "whole"))
    report = evaluate_correct_proofs(
        target, "whole", llm, fixture_checker, _opts_factory(dictionaries, corpus)
    )
    assert report.compiling_whole_proofs == 1
    assert report.proof_exact == 1
