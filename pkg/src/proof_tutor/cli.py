"""Operator command line: evaluation, dataset generation, checking, tutoring."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .autoformalize import FormalizeOptions
from .checker import (
    BackendUnavailable,
    CheckRequest,
    FixtureChecker,
    LeanReplChecker,
    ReplConfig,
    Status,
)
from .config import Config, load_config
from .dataset import (
    ManifestEntry,
    build_dictionaries,
    generate_incorrect_set,
    load_corpus,
    load_descriptions,
    parse_annotated_file,
    serialize_annotated_proof,
    write_manifest,
)
from .evaluation import (
    evaluate_correct_proofs,
    evaluate_incorrect_proofs,
    write_verdict_log,
)
from .llm import PromptKnobs, RemoteChatBackend, ReplayBackend, ScriptedBackend
from .model import AnnotatedProof, Label, Persona
from .service import TutorEngine


def _build_backend(config: Config):
    if config.backend == "remote":
        return RemoteChatBackend(config.remote_base_url, api_key_env=config.api_key_env)
    if config.backend == "replay":
        if config.replay_dir is None:
            raise click.UsageError("replay backend needs --replay-dir")
        return ReplayBackend(config.replay_dir)
    if config.mock_script is None:
        raise click.UsageError("mock backend needs --mock-script")
    responses = json.loads(Path(config.mock_script).read_text(encoding="utf-8"))
    return ScriptedBackend(responses=responses)


def _build_checker(config: Config):
    if config.lean_project_root is not None:
        return LeanReplChecker(ReplConfig(project_root=config.lean_project_root))
    return FixtureChecker.from_file(config.fixture_path)


def _knobs(config: Config) -> PromptKnobs:
    return PromptKnobs(temperature=config.temperature, model_id=config.model_id)


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--backend", type=click.Choice(["remote", "replay", "mock"]), default=None)
@click.option("--replay-dir", type=click.Path(), default=None)
@click.option("--mock-script", type=click.Path(exists=True), default=None)
@click.option("--dataset-root", type=click.Path(exists=True), default=None)
@click.option("--lean-project-root", type=click.Path(exists=True), default=None)
@click.pass_context
def main(ctx, config_path, backend, replay_dir, mock_script, dataset_root, lean_project_root):
    """Proof tutoring engine for natural-language Peano arithmetic proofs."""
    ctx.obj = load_config(
        config_path,
        backend=backend,
        replay_dir=replay_dir,
        mock_script=mock_script,
        dataset_root=dataset_root,
        lean_project_root=lean_project_root,
    )


@main.command("eval-autoform")
@click.option("--mode", type=click.Choice(["step", "whole"]), default="step")
@click.option("--staff-solution", type=click.Choice(["on", "off"]), default="on")
@click.option("--log", "log_path", type=click.Path(), default=None)
@click.pass_obj
def cmd_eval_autoform(config: Config, mode, staff_solution, log_path):
    """Score the autoformalizer over the corpus and print accuracies."""
    proofs = load_corpus(config.dataset_root)
    descriptions = load_descriptions(config.descriptions_path)
    theorem_dict, tactic_dict, _ = build_dictionaries(proofs, descriptions)
    staff = {
        p.theorem.name: p
        for p in proofs
        if p.persona is Persona.STAFF_SOLUTION and p.label is Label.CORRECT
    }
    include_staff = staff_solution == "on"

    def opts_for(proof: AnnotatedProof) -> FormalizeOptions:
        return FormalizeOptions(
            theorem_dict=theorem_dict,
            tactic_dict=tactic_dict,
            staff_solution=staff.get(proof.theorem.name) if include_staff else None,
            knobs=_knobs(config),
        )

    llm = _build_backend(config)
    checker = _build_checker(config)
    correct = evaluate_correct_proofs(proofs, mode, llm, checker, opts_for)
    incorrect = evaluate_incorrect_proofs(proofs, mode, llm, checker, opts_for)
    for line in correct.summary_lines() + incorrect.summary_lines()[1:]:
        click.echo(line)
    if log_path:
        write_verdict_log(log_path, correct.verdicts)
        click.echo(f"verdict log written to {log_path}")


@main.command("gen-incorrect")
@click.option("--seed", type=int, required=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.pass_obj
def cmd_gen_incorrect(config: Config, seed, out_dir):
    """Generate incorrect proofs by step skipping and write corpus files."""
    proofs = load_corpus(config.dataset_root)
    eligible = [p for p in proofs if p.persona is not Persona.STAFF_SOLUTION]
    generated, report = generate_incorrect_set(eligible, seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for proof in generated:
        filename = f"{proof.theorem.name}_{proof.persona.value}_incorrect.lean"
        (out / filename).write_text(serialize_annotated_proof(proof), encoding="utf-8")
        entries.append(
            ManifestEntry(
                theorem=proof.theorem.name,
                world=proof.theorem.world,
                order_index=proof.theorem.order_index,
                persona=proof.persona,
                file=filename,
                label=Label.INCORRECT,
                skipped_index=proof.skipped_index,
                statement_nl=proof.theorem.statement_nl or None,
            )
        )
    write_manifest(out / "manifest.jsonl", entries)
    click.echo(f"generated {report.generated} incorrect proofs into {out}")
    for theorem, persona, reason in report.skipped:
        click.echo(f"skipped {theorem} ({persona}): {reason}")


@main.command("check")
@click.argument("file", type=click.Path(exists=True))
@click.pass_obj
def cmd_check(config: Config, file):
    """Run each proof in FILE through the checker, one prefix at a time."""
    proofs = parse_annotated_file(Path(file).read_text(encoding="utf-8"))
    checker = _build_checker(config)
    failed = False
    for proof in proofs:
        click.echo(proof.theorem.name)
        tactics: list[str] = []
        for i, step in enumerate(proof.steps, start=1):
            tactics.append(step.tactic)
            try:
                result = checker.check(
                    CheckRequest(
                        theorem_header=proof.theorem.statement_fl, tactics=tuple(tactics)
                    )
                )
            except BackendUnavailable as exc:
                click.echo(f"  step {i}: backend unavailable ({exc})")
                failed = True
                break
            message = result.message or ""
            click.echo(f"  step {i}: {result.status.value}  {message}".rstrip())
            if result.status is Status.ERROR:
                break
    if failed:
        sys.exit(1)


@main.command("tutor")
@click.argument("theorem")
@click.pass_obj
def cmd_tutor(config: Config, theorem):
    """Interactive terminal tutoring loop for THEOREM."""
    engine = _make_engine(config)
    record = engine.create_session(theorem)
    click.echo(f"Theorem: {record.theorem.statement_nl or record.theorem.name}")
    click.echo("Enter proof steps in plain language. Commands: /hint, /quit")
    while True:
        line = click.prompt("step", default="", show_default=False)
        if not line.strip():
            continue
        if line.strip() == "/quit":
            break
        if line.strip() == "/hint":
            bundle = engine.request_hint(record.session_id)
            click.echo(f"Question: {bundle.question}")
            click.echo(f"Next step (revealed): {bundle.informalization}")
            continue
        outcome = engine.submit_step(record.session_id, line)
        if outcome.verdict == "complete":
            click.echo("The proof is complete. Well done!")
            break
        if outcome.verdict == "ok":
            click.echo(outcome.goal_summary or "")
        else:
            assert outcome.feedback is not None
            click.echo(f"[{outcome.feedback.error_type.value}] {outcome.feedback.message}")
            click.echo(f"Question: {outcome.feedback.question}")
            break


def _make_engine(config: Config) -> TutorEngine:
    proofs = load_corpus(config.dataset_root)
    descriptions = load_descriptions(config.descriptions_path)
    return TutorEngine(
        proofs=proofs,
        llm=_build_backend(config),
        checker=_build_checker(config),
        knobs=_knobs(config),
        journal_path=config.session_journal,
        descriptions=descriptions,
        include_staff_solution=config.include_staff_solution,
        search_config=config.search,
    )


@main.command("serve")
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.pass_obj
def cmd_serve(config: Config, port, host):
    """Run the HTTP session service."""
    import uvicorn

    from .service import create_app

    app = create_app(_make_engine(config))
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
