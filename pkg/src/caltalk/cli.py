"""Command line entry points: repl | serve | parse | lint."""

from __future__ import annotations

import sys

import click

from .dialogue import Session
from .grammar import load_grammar_file, validate_grammar
from .lexicon import tokenize
from .parser import chart_trace, parse as run_parse
from .semantics import render_slots, slots_block

def _packaged_grammar() -> str:
    from importlib.resources import files

    return str(files("caltalk").joinpath("data/calendar.grammar"))


grammar_option = click.option(
    "--grammar", envvar="CALTALK_GRAMMAR", default=None,
    help="Path to the grammar file (default: the packaged calendar grammar).",
)
store_option = click.option(
    "--store", envvar="CALTALK_STORE", default=None,
    help="Path to the calendar store (JSONL; omit for in-memory).",
)
today_option = click.option(
    "--today", envvar="CALTALK_TODAY", default=None,
    help="Anchor date YYYY-MM-DD for resolving weekdays and years.",
)
trace_option = click.option("--trace", is_flag=True, help="Keep chart traces per turn.")


@click.group()
def main():
    """A dialog engine that schedules calendar events through conversation."""


@main.command()
@grammar_option
@store_option
@today_option
@trace_option
def repl(grammar, store, today, trace):
    """Interactive dialog loop. Commands: :slots, :chart, :quit."""
    try:
        session = Session(grammar or _packaged_grammar(), store=store, today=today, trace=True)
    except Exception as err:
        click.echo(f"grammar load failed: {err}", err=True)
        sys.exit(2)
    click.echo("caltalk ready. Type an utterance, or :slots / :chart / :quit.")
    while True:
        try:
            line = input("|: ").strip()
        except EOFError:
            break
        if not line:
            continue
        if line == ":quit":
            break
        if line == ":slots":
            click.echo(slots_block(session.acc))
            continue
        if line == ":chart":
            diag = session.last_diagnostics
            if diag is None:
                click.echo("no parse yet")
            else:
                click.echo("  Chart results: INACTIVE EDGES")
                for trace_line in chart_trace(diag):
                    click.echo(trace_line)
            continue
        result = session.run_turn(line)
        click.echo(result.reply.surface_text)
        if trace and result.trace:
            for trace_line in result.trace:
                click.echo(trace_line)
    sys.exit(0)


@main.command()
@grammar_option
@store_option
@today_option
@trace_option
@click.option("--addr", envvar="CALTALK_ADDR", default="127.0.0.1:8000",
              help="host:port to listen on.")
def serve(grammar, store, today, trace, addr):
    """Run the HTTP service."""
    import uvicorn

    from .service import ServiceConfig, create_app

    grammar_path = grammar or _packaged_grammar()
    try:
        load_grammar_file(grammar_path)
    except Exception as err:
        click.echo(f"grammar load failed: {err}", err=True)
        sys.exit(2)
    host, _, port = addr.partition(":")
    app = create_app(
        ServiceConfig(
            grammar_path=grammar_path,
            store_path=store,
            today=today,
            trace=trace,
        )
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000))


@main.command(name="parse")
@grammar_option
@today_option
@click.option("--question", default=None,
              help="Pending question pattern, e.g. time(_).")
@click.option("--chart", "show_chart", is_flag=True, help="Print the inactive-edge chart.")
@click.argument("utterance")
def parse_cmd(grammar, today, question, show_chart, utterance):
    """One-shot: parse an utterance and print its slots."""
    from . import ontology
    from .context import ContextState
    from .semantics import DomainMapping, interpret

    g = load_grammar_file(grammar or _packaged_grammar())
    ctx = ContextState(
        current_domain=g.domain,
        current_application=g.application,
        language="english",
        current_discourse=["(seeded)"],
        defaults={"today": today} if today else {},
    )
    if question:
        ctx.current_question = ontology.parse_category(question)
    readings, diagnostics = run_parse(tokenize(utterance), ctx, g)
    dm = DomainMapping.from_grammar(g)
    if show_chart:
        click.echo("  Chart results: INACTIVE EDGES")
        for line in chart_trace(diagnostics):
            click.echo(line)
    if diagnostics.unknown_tokens:
        click.echo("unknown tokens: " + ", ".join(diagnostics.unknown_tokens))
    for i, reading in enumerate(readings, start=1):
        slots = interpret(reading, ctx, dm)
        click.echo(f"reading {i}: {render_slots(slots)}")
    if not readings:
        click.echo("no reading")
        sys.exit(1)


@main.command()
@store_option
def export(store):
    """Emit the calendar store as iCalendar text."""
    from .calendar import EventStore

    if not store:
        click.echo("export needs --store (or CALTALK_STORE)", err=True)
        sys.exit(2)
    click.echo(EventStore(store).to_ical(), nl=False)


@main.command()
@grammar_option
def lint(grammar):
    """Load and validate a grammar, printing diagnostics."""
    path = grammar or _packaged_grammar()
    try:
        g = load_grammar_file(path)
    except Exception as err:
        click.echo(f"error: {err}")
        sys.exit(2)
    diagnostics = validate_grammar(g)
    for d in diagnostics:
        click.echo(str(d))
    errors = [d for d in diagnostics if d.severity == "error"]
    click.echo(
        f"{len(g.phrasal_constructions)} constructions, {len(g.lexical_entries)} lexical entries, "
        f"{len(errors)} errors, {len(diagnostics) - len(errors)} warnings"
    )
    sys.exit(1 if errors else 0)


if __name__ == "__main__":
    main()
