"""Command-line front door.

Exit codes: 0 success, 1 validation error, 2 I/O error. With --json the
output is byte-identical to the corresponding HTTP response body, so
scripts can treat the CLI and the service interchangeably.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import serialize
from .assessment import (
    ComponentId,
    DEFAULT_WEIGHTS,
    MarkError,
    parse_mark,
    parse_marks_csv,
)
from .explanation import render_detailed, render_general, trace_to_json
from .promotion import (
    Rank,
    content_trace_id,
    evaluate_sheet,
    rank_cadets,
    what_if,
)
from .rules import ParseError, default_rules_text, parse_rules
from .service import ServiceConfig, load_config, serve as run_service, trace_from_json
from .store import (
    CadetRecord,
    DuplicateError,
    NotFoundError,
    Store,
    StoreError,
    StoreLockedError,
)

EXIT_VALIDATION = 1
EXIT_IO = 2


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (MarkError, ParseError, NotFoundError, DuplicateError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
        except (StoreLockedError, StoreError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_IO)

    return wrapper


@click.group()
@click.option(
    "--store",
    "store_path",
    envvar="CADEX_STORE",
    type=click.Path(path_type=Path),
    default=Path("./cadex-store"),
    show_default=True,
    help="Store directory.",
)
@click.option(
    "--rules",
    "rules_path",
    envvar="CADEX_RULES",
    type=click.Path(path_type=Path),
    default=None,
    help="Rule file (defaults to the bundled ruleset).",
)
@click.pass_context
def main(ctx, store_path: Path, rules_path: Path | None):
    """Cadet performance staging and promotion-ranking expert system."""
    ctx.ensure_object(dict)
    ctx.obj["store_path"] = store_path
    ctx.obj["rules_path"] = rules_path


def _load_ruleset(ctx):
    rules_path = ctx.obj["rules_path"]
    text = rules_path.read_text("utf-8") if rules_path else default_rules_text()
    return parse_rules(text)


def _emit_json(content):
    sys.stdout.buffer.write(serialize.dumps_api(content))
    sys.stdout.buffer.flush()


@main.group()
def rules():
    """Rule file tooling."""


@rules.command("check")
@click.argument("rule_file", type=click.Path(path_type=Path))
@handle_errors
def rules_check(rule_file: Path):
    """Parse and validate a rule file."""
    try:
        text = rule_file.read_text("utf-8")
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)
    ruleset = parse_rules(text)
    click.echo(f"{len(ruleset)} rules, OK")


@main.command("import")
@click.argument("csv_file", type=click.Path(path_type=Path))
@click.option("--resubmit", is_flag=True, help="Allow superseding existing marks.")
@click.pass_context
@handle_errors
def import_csv(ctx, csv_file: Path, resubmit: bool):
    """Import mark sheets from CSV; unknown cadets are created as CadetOfficer."""
    try:
        text = csv_file.read_text("utf-8")
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)
    sheets = parse_marks_csv(text)
    created = 0
    with Store.open(ctx.obj["store_path"]) as store:
        for sheet in sheets:
            if sheet.cadet_id not in store.cadets:
                store.put_cadet(
                    CadetRecord(sheet.cadet_id, sheet.cadet_id, Rank.CADET_OFFICER, sheet.cycle)
                )
                created += 1
            store.submit_marks(sheet.cadet_id, sheet, resubmit=resubmit)
    click.echo(f"imported {len(sheets)} mark sheets ({created} cadets created)")


@main.command()
@click.argument("cadet_id")
@click.option("--cycle", default=None, help="Assessment cycle (default: latest).")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
@handle_errors
def evaluate(ctx, cadet_id: str, cycle: str | None, as_json: bool):
    """Evaluate a cadet's stored marks and persist the trace."""
    ruleset = _load_ruleset(ctx)
    with Store.open(ctx.obj["store_path"]) as store:
        record = store.get_cadet(cadet_id)
        if cycle is None:
            cycles = [c for cid, c in store.sheets if cid == cadet_id]
            if not cycles:
                raise NotFoundError(f"no marks for {cadet_id!r}")
            cycle = max(cycles)
        sheet = store.latest_sheet(cadet_id, cycle)
        evaluation = evaluate_sheet(
            sheet, DEFAULT_WEIGHTS, ruleset, record.rank,
            trace_id=content_trace_id(sheet, record.rank),
        )
        store.record_trace(trace_to_json(evaluation.trace))
    if as_json:
        _emit_json(serialize.evaluation_response(cadet_id, cycle, evaluation))
        return
    click.echo(f"cadet      {cadet_id}")
    click.echo(f"cycle      {cycle}")
    click.echo(f"composite  {evaluation.composite}")
    click.echo(f"stage      {evaluation.stage.value}")
    ranks = ", ".join(r.value for r in evaluation.eligible) or "(none)"
    click.echo(f"eligible   {ranks}")
    click.echo(f"trace      {evaluation.trace.trace_id}")


@main.command()
@click.option("--cycle", required=True, help="Assessment cycle to rank.")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
@handle_errors
def rank(ctx, cycle: str, as_json: bool):
    """Rank all cadets with marks in a cycle."""
    ruleset = _load_ruleset(ctx)
    with Store.open(ctx.obj["store_path"]) as store:
        entries = [
            (sheet.cadet_id, sheet, store.get_cadet(sheet.cadet_id).rank)
            for sheet in store.sheets_for_cycle(cycle)
        ]
        notes = {cid: store.list_notes(cid) for cid, _, _ in entries}
    ranked = rank_cadets(entries, DEFAULT_WEIGHTS, ruleset, notes)
    if as_json:
        _emit_json(serialize.ranking_json(ranked))
        return
    click.echo(f"{'#':>3} {'cadet':<12} {'composite':>9} {'stage':<8} {'flags':<12} eligible")
    for position, entry in enumerate(ranked, start=1):
        flags = ",".join(
            name
            for name, on in (("tie", entry.tie_break_used), ("review", entry.manual_review))
            if on
        )
        ranks = ", ".join(r.value for r in entry.eligible) or "(none)"
        click.echo(
            f"{position:>3} {entry.cadet_id:<12} {str(entry.composite):>9} "
            f"{entry.stage.value:<8} {flags:<12} {ranks}"
        )


@main.command()
@click.argument("trace_id")
@click.option("--detailed", is_flag=True)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
@handle_errors
def explain(ctx, trace_id: str, detailed: bool, as_json: bool):
    """Show the stored explanation for an evaluation."""
    ruleset = _load_ruleset(ctx)
    with Store.open(ctx.obj["store_path"]) as store:
        doc = store.get_trace(trace_id)
    trace = trace_from_json(doc)
    view = "detailed" if detailed else "general"
    rendered = (
        render_detailed(trace, DEFAULT_WEIGHTS, ruleset) if detailed else render_general(trace)
    )
    if as_json:
        _emit_json(serialize.trace_view(doc, view, rendered))
        return
    click.echo(rendered, nl=False)


@main.command()
@click.argument("cadet_id")
@click.option("--cycle", default=None)
@click.option(
    "--set",
    "changes",
    multiple=True,
    metavar="COMPONENT=MARK",
    help="Hypothetical mark change; repeatable.",
)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
@handle_errors
def whatif(ctx, cadet_id: str, cycle: str | None, changes: tuple[str, ...], as_json: bool):
    """Evaluate hypothetical marks without persisting anything."""
    ruleset = _load_ruleset(ctx)
    modifications = {}
    for change in changes:
        if "=" not in change:
            raise MarkError(f"--set expects COMPONENT=MARK, got {change!r}")
        key, _, value = change.partition("=")
        try:
            component = ComponentId(key.strip())
        except ValueError:
            raise MarkError(f"unknown component {key.strip()!r}") from None
        modifications[component] = parse_mark(value.strip())
    with Store.open(ctx.obj["store_path"]) as store:
        record = store.get_cadet(cadet_id)
        if cycle is None:
            cycles = [c for cid, c in store.sheets if cid == cadet_id]
            if not cycles:
                raise NotFoundError(f"no marks for {cadet_id!r}")
            cycle = max(cycles)
        sheet = store.latest_sheet(cadet_id, cycle)
    evaluation = what_if(sheet, modifications, DEFAULT_WEIGHTS, ruleset, record.rank)
    if as_json:
        _emit_json(
            serialize.whatif_response(cadet_id, cycle, evaluation, trace_to_json(evaluation.trace))
        )
        return
    click.echo(f"composite  {evaluation.composite}")
    click.echo(f"stage      {evaluation.stage.value}")
    ranks = ", ".join(r.value for r in evaluation.eligible) or "(none)"
    click.echo(f"eligible   {ranks}")


@main.command()
@click.argument("destination", type=click.Path(path_type=Path))
@click.pass_context
@handle_errors
def export(ctx, destination: Path):
    """Write a backup archive of the store."""
    with Store.open(ctx.obj["store_path"]) as store:
        archive = store.export_backup(destination)
    click.echo(str(archive))


@main.command("serve")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--listen", default=None, help="host:port (overrides config).")
@click.pass_context
@handle_errors
def serve_cmd(ctx, config_path: Path | None, listen: str | None):
    """Run the HTTP service."""
    if config_path:
        config = load_config(config_path)
    else:
        config = ServiceConfig(
            store_path=ctx.obj["store_path"], rules_path=ctx.obj["rules_path"]
        )
    if listen:
        config.listen = listen
    run_service(config)


if __name__ == "__main__":
    main()
