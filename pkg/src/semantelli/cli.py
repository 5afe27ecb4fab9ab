"""Command-line interface.

Exit codes: 0 on success, 1 on usage errors (bad flags, empty query),
2 when a search could not be completed (all backends failed, nothing
enabled). ``search --json`` prints exactly the bytes the HTTP endpoint
would return.
"""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import click

from .config import AppConfig, load_config
from .errors import EmptyQuery, QueryTooLong, SemantelliError
from .pipeline import SearchService, to_json
from .ranking import NUMERATOR_HIT_PLUS_LINKS, NUMERATOR_HIT_PLUS_ONE


def _numerator_choice() -> click.Choice:
    return click.Choice([NUMERATOR_HIT_PLUS_LINKS, NUMERATOR_HIT_PLUS_ONE])


def _app_config(
    config_path: str | None,
    seid: str | None,
    fixture_dir: str | None,
    damping: float | None,
    relevance_numerator: str | None,
) -> AppConfig:
    config = load_config(config_path)
    if seid:
        config.seid_path = Path(seid)
    if fixture_dir:
        config.fixture_dir = Path(fixture_dir)
    score_overrides = {}
    if damping is not None:
        score_overrides["damping"] = damping
    if relevance_numerator is not None:
        score_overrides["relevance_numerator"] = relevance_numerator
    if score_overrides:
        config.score = dataclasses.replace(config.score, **score_overrides)
    return config.validate()


def common_options(command):
    for option in reversed(
        [
            click.option("--config", "config_path", type=click.Path(), default=None,
                         help="key=value config file (or set SEMANTELLI_CONFIG)"),
            click.option("--seid", type=click.Path(), default=None,
                         help="engine registry file"),
            click.option("--fixture-dir", type=click.Path(), default=None,
                         help="directory of per-engine fixture corpora"),
            click.option("--damping", type=float, default=None,
                         help="damping constant applied to the engine weight"),
            click.option("--relevance-numerator", type=_numerator_choice(), default=None,
                         help="relevance formula numerator"),
        ]
    ):
        command = option(command)
    return command


@click.group()
def cli() -> None:
    """Federated metasearch with transparent scoring."""


@cli.command()
@click.argument("query")
@click.option("--json", "as_json", is_flag=True, help="print the canonical JSON response")
@click.option("--table", "as_table", is_flag=True, help="print a human-readable table (default)")
@click.option("--limit", type=int, default=20, show_default=True,
              help="results kept after ranking")
@click.option("--verbose", is_flag=True, help="include full-precision scores in JSON")
@click.option("--dump-session", type=click.Path(), default=None,
              help="write the raw per-engine session as JSON to this path")
@common_options
def search(
    query: str,
    as_json: bool,
    as_table: bool,
    limit: int,
    verbose: bool,
    dump_session: str | None,
    config_path: str | None,
    seid: str | None,
    fixture_dir: str | None,
    damping: float | None,
    relevance_numerator: str | None,
) -> None:
    """Run QUERY through every enabled engine and print the fused ranking."""
    if as_json and as_table:
        raise click.UsageError("--json and --table are mutually exclusive")
    service = SearchService.from_config(
        _app_config(config_path, seid, fixture_dir, damping, relevance_numerator)
    )
    try:
        response, session = service.execute(query, limit=limit, verbose=verbose)
    except (EmptyQuery, QueryTooLong) as exc:
        raise click.UsageError(str(exc)) from exc

    if dump_session:
        Path(dump_session).write_text(
            json.dumps(session.to_debug_dict(), ensure_ascii=False, indent=2),
            encoding="utf-8",
        )
    if as_json:
        click.echo(to_json(response))
    else:
        _print_table(response)


def _print_table(response: dict) -> None:
    click.echo(f"query: {response['query']}")
    click.echo("combinations: " + ", ".join(response["combinations"]))
    plan = ", ".join(
        f"{entry['engine_id']}(p{entry['priority']} w={entry['weight']:.3f})"
        for entry in response["engine_plan"]
    )
    click.echo(f"plan: {plan}")
    report = ", ".join(
        f"{entry['engine_id']}={entry['status']}:{entry['results']}"
        for entry in response["fetch_report"]
    )
    click.echo(f"fetch: {report}")
    click.echo("")
    if not response["results"]:
        click.echo("no results")
        return
    click.echo(f"{'rank':>4}  {'score':>6}  result")
    for row in response["results"]:
        engines = "+".join(
            f"{e['engine_id']}#{e['origin_rank']}" for e in row["engines"]
        )
        click.echo(f"{row['final_rank']:>4}  {row['telli_factor']:>6.3f}  {row['title']}")
        click.echo(f"{'':>4}  {'':>6}  {row['canonical_url']} [{engines}]")


@cli.command()
@click.option("--listen", default=None, help="address:port to bind (default 127.0.0.1:8765)")
@click.option("--ui-dir", type=click.Path(), default=None,
              help="directory of built UI assets to serve under /ui")
@common_options
def serve(
    listen: str | None,
    ui_dir: str | None,
    config_path: str | None,
    seid: str | None,
    fixture_dir: str | None,
    damping: float | None,
    relevance_numerator: str | None,
) -> None:
    """Start the HTTP service."""
    import uvicorn

    from .api import create_app

    config = _app_config(config_path, seid, fixture_dir, damping, relevance_numerator)
    address = listen or config.listen
    host, _, port_text = address.rpartition(":")
    if not host or not port_text.isdigit():
        raise click.UsageError(f"--listen must look like host:port, got {address!r}")

    ui_path = Path(ui_dir) if ui_dir else config.ui_dir
    if ui_path is None:
        candidate = Path("frontend") / "dist"
        ui_path = candidate if candidate.is_dir() else None

    service = SearchService.from_config(config)
    app = create_app(service, ui_dir=ui_path)
    uvicorn.run(app, host=host, port=int(port_text), log_level="info")


@cli.group()
def engines() -> None:
    """Inspect or tune the engine registry."""


@engines.command("list")
@click.option("--json", "as_json", is_flag=True, help="print the roster as JSON")
@common_options
def engines_list(
    as_json: bool,
    config_path: str | None,
    seid: str | None,
    fixture_dir: str | None,
    damping: float | None,
    relevance_numerator: str | None,
) -> None:
    """Show every engine with its weight, enabled flag and adapter kind."""
    service = SearchService.from_config(
        _app_config(config_path, seid, fixture_dir, damping, relevance_numerator)
    )
    roster = service.engines()
    if as_json:
        click.echo(json.dumps({"engines": roster}, ensure_ascii=False, indent=2))
        return
    click.echo(f"{'engine':<14}{'display':<16}{'weight':>7}  {'enabled':<8}adapter")
    for engine in roster:
        click.echo(
            f"{engine['engine_id']:<14}{engine['display_name']:<16}"
            f"{engine['weight']:>7.3f}  {str(engine['enabled']).lower():<8}{engine['adapter']}"
        )


@engines.command("set-weight")
@click.argument("engine_id")
@click.argument("weight", type=float)
@common_options
def engines_set_weight(
    engine_id: str,
    weight: float,
    config_path: str | None,
    seid: str | None,
    fixture_dir: str | None,
    damping: float | None,
    relevance_numerator: str | None,
) -> None:
    """Set ENGINE_ID's initial weight (persisted to the registry file)."""
    service = SearchService.from_config(
        _app_config(config_path, seid, fixture_dir, damping, relevance_numerator)
    )
    service.set_weight(engine_id, weight)
    click.echo(f"{engine_id} weight set to {weight:.3f}")


@cli.command()
@click.argument("query")
@click.option("--out", "out_dir", type=click.Path(), default="report",
              show_default=True, help="output directory")
@click.option("--tsv", is_flag=True, help="write results.tsv instead of results.csv")
@click.option("--limit", type=int, default=20, show_default=True)
@common_options
def report(
    query: str,
    out_dir: str,
    tsv: bool,
    limit: int,
    config_path: str | None,
    seid: str | None,
    fixture_dir: str | None,
    damping: float | None,
    relevance_numerator: str | None,
) -> None:
    """Search and write the ranking as a delimited table plus PNG figures."""
    from .report import write_report

    service = SearchService.from_config(
        _app_config(config_path, seid, fixture_dir, damping, relevance_numerator)
    )
    try:
        response = service.search(query, limit=limit)
    except (EmptyQuery, QueryTooLong) as exc:
        raise click.UsageError(str(exc)) from exc
    paths = write_report(response, out_dir, delimiter="\t" if tsv else ",")
    for path in paths:
        click.echo(f"wrote {path}")


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 1
    except click.ClickException as exc:
        exc.show()
        return 2
    except SemantelliError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
