"""Command line: scenario runner, interactive session, service, planner, report."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import defaults, planner
from .engine import ScriptError, Session, SessionSpec, run_scenario


def _load_script(ref: str) -> tuple[dict, Path | None]:
    path = Path(ref)
    if path.exists():
        text = path.read_text(encoding="utf-8")
        if path.suffix in (".yaml", ".yml"):
            import yaml

            return yaml.safe_load(text), path.parent
        return json.loads(text), path.parent
    try:
        return defaults.scenario_doc(ref), None
    except FileNotFoundError:
        raise click.ClickException(f"no such script file or bundled scenario: {ref}") from None


@click.group()
def main():
    """caio: cognitive-affective dialogue agent."""


@main.command()
@click.argument("script")
@click.option("--log", "log_path", type=click.Path(dir_okay=False), help="write the JSON-lines event log here")
@click.option("--report-dir", type=click.Path(file_okay=False), help="render events.csv and figures here")
@click.option("--patterns", type=click.Path(exists=True, dir_okay=False), help="override the utterance-pattern file")
@click.option("--quiet", is_flag=True, help="only print the final verdict")
def run(script, log_path, report_dir, patterns, quiet):
    """Run a scenario script and check its expectations."""
    doc, base_dir = _load_script(script)
    if patterns:
        doc = dict(doc, patterns=str(Path(patterns).resolve()))
    try:
        transcript = run_scenario(doc, base_dir, raise_on_failure=False)
    except ScriptError as exc:
        raise click.ClickException(str(exc)) from exc
    if not quiet:
        for event in transcript.events:
            click.echo(event.to_json())
    for step in transcript.steps:
        verdict = "PASS" if step.passed else "FAIL"
        click.echo(f"step {step.index}: {verdict}")
        for failure in step.failures:
            click.echo(f"  {failure}")
    if log_path:
        Path(log_path).write_text(transcript.log_text(), encoding="utf-8")
        click.echo(f"event log written to {log_path}")
    if report_dir:
        from .report import render_report

        if not log_path:
            log_path = Path(report_dir) / "events.jsonl"
            Path(report_dir).mkdir(parents=True, exist_ok=True)
            Path(log_path).write_text(transcript.log_text(), encoding="utf-8")
        for path in render_report(Path(log_path), Path(report_dir)):
            click.echo(f"report: {path}")
    if not transcript.passed:
        sys.exit(1)
    click.echo("scenario PASSED")


@main.command()
@click.option("--script", "script_ref", default="nao_unplugged", help="scenario providing agents/init facts")
@click.option("--patterns", type=click.Path(exists=True, dir_okay=False), help="override the utterance-pattern file")
def repl(script_ref, patterns):
    """Talk to the agent interactively; its inner events print as they happen."""
    doc, base_dir = _load_script(script_ref)
    doc = dict(doc)
    doc.pop("steps", None)
    if patterns:
        doc["patterns"] = str(Path(patterns).resolve())
    spec = SessionSpec.load(doc, base_dir)
    session = Session(spec, session_id="repl")
    click.echo(f"session ready: you are {spec.interlocutor}, the agent is {spec.self_agent}")
    click.echo("type an utterance (ctrl-d or 'quit' to leave)")
    while True:
        try:
            text = input(f"{spec.interlocutor}> ").strip()
        except EOFError:
            click.echo()
            break
        if not text:
            continue
        if text.lower() in ("quit", "exit"):
            break
        events = session.handle_utterance(text)
        for event in events:
            if event.kind == "emotion_triggered":
                p = event.payload
                target = f" at {p['target']}" if p.get("target") else ""
                click.echo(f"  [feels {p['category']}{target} about {p['content']} ({p['intensity']:.2f})]")
            elif event.kind == "expression_rendered":
                labels = ", ".join(label for _, label in event.payload["expression"])
                click.echo(f"  [expression: {labels}]")
            elif event.kind == "utterance_out":
                click.echo(f"{spec.self_agent}: {event.payload['text']}")
            elif event.kind == "plan_failed":
                click.echo(f"  [no way to achieve {event.payload['goal']}]")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--ui-dir", type=click.Path(file_okay=False), help="directory with the built console assets")
def serve(host, port, ui_dir):
    """Start the HTTP/WebSocket service (and the web console if built)."""
    import uvicorn

    from .service import create_app

    app = create_app(ui_dir=Path(ui_dir) if ui_dir else None)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command(name="plan")
@click.argument("domain", type=click.Path(exists=True, dir_okay=False))
@click.argument("problem", type=click.Path(exists=True, dir_okay=False))
@click.option("--bound", default=12, show_default=True, type=int)
def plan_command(domain, problem, bound):
    """Solve a PDDL problem; prints one step per line or UNREACHABLE."""
    from .memory import ValidationError

    try:
        operators = planner.parse_domain(Path(domain).read_text(encoding="utf-8"))
        prob = planner.parse_problem(Path(problem).read_text(encoding="utf-8"))
    except (planner.PddlSyntaxError, ValidationError) as exc:
        raise click.ClickException(str(exc)) from exc
    ground = planner.ground_operators(operators, prob.objects)
    result = planner.plan(prob.init, prob.goal_pos, ground, bound=bound, goal_neg=prob.goal_neg)
    if isinstance(result, planner.Unreachable):
        click.echo("UNREACHABLE")
        sys.exit(1)
    for step in result.steps:
        click.echo(step.display)


@main.command(name="report")
@click.argument("log", type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", default="report", show_default=True, type=click.Path(file_okay=False))
def report_command(log, out_dir):
    """Render an event log into events.csv plus figures."""
    from .report import render_report

    for path in render_report(Path(log), Path(out_dir)):
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
