# app/cli.py
import json
import logging
import sys
from pathlib import Path
from typing import List

import click
from tqdm import tqdm

from .algebra import MonomialOrder
from .config import get_settings
from .core.errors import PrismForgeError
from .schemas.certificates import Report
from .services import build_services
from .services.reports import ReportService, render_text
from .services.tower import RootsKind
from .utils.specfile import load_spec_file

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _emit(report: Report, fmt: str):
    if fmt == "json":
        click.echo(report.model_dump_json(indent=2))
    else:
        click.echo(render_text(report))
    sys.exit(report.exit_code)


def _fail(error: PrismForgeError, fmt: str):
    error.log()
    if fmt == "json":
        click.echo(json.dumps({"error": error.to_payload()}, indent=2, default=str))
    else:
        click.echo(f"error [{error.error_code}]: {error}", err=True)
    sys.exit(error.exit_code)


def _parse_matrix(text: str) -> List[List[int]]:
    """'1,0; 1,1; 1,3' -> [[1, 0], [1, 1], [1, 3]], one row per generator"""
    try:
        return [
            [int(x) for x in row.replace(",", " ").split()]
            for row in text.split(";")
            if row.strip()
        ]
    except ValueError:
        raise click.BadParameter(f"not an integer matrix: {text!r}")


@click.group()
@click.option("--max-pairs", type=int, default=None, help="Gröbner pair cap")
@click.option("--max-degree", type=int, default=None, help="Gröbner degree cap")
@click.option("--max-iter", type=int, default=None, help="δ-stabilization rounds")
@click.option("--levels", type=int, default=None, help="Tower / root-closure levels")
@click.option("--order", type=click.Choice(["grevlex", "lex"]), default="grevlex")
@click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text"
)
@click.pass_context
def cli(ctx, max_pairs, max_degree, max_iter, levels, order, fmt):
    """prismforge: δ-rings, prisms and perfectoid towers"""
    try:
        settings = get_settings(max_pairs, max_degree, max_iter, levels)
    except PrismForgeError as e:
        _fail(e, fmt)
    logging.basicConfig(level=settings.log_level, format=LOG_FORMAT)
    services = build_services(settings)
    if order == "lex":
        services.engine.default_order = MonomialOrder.lex()
    ctx.obj = {
        "settings": settings,
        "reports": ReportService(services),
        "format": fmt,
    }


def _run(ctx, action):
    fmt = ctx.obj["format"]
    try:
        report = action(ctx.obj["reports"], ctx.obj["settings"])
    except PrismForgeError as e:
        _fail(e, fmt)
    _emit(report, fmt)


@cli.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--poly", required=True, help="Polynomial in the file's variables")
@click.pass_context
def delta(ctx, file, poly):
    """Print δ(f) and φ(f)."""
    _run(ctx, lambda reports, _: reports.delta(load_spec_file(file), poly))


@cli.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.pass_context
def stabilize(ctx, file):
    """δ-stabilize the ideal of FILE and report its δ-height."""
    _run(
        ctx,
        lambda reports, settings: reports.stabilize(
            load_spec_file(file), settings.max_iter
        ),
    )


@cli.command("check-prism")
@click.argument("file", type=click.Path(dir_okay=False))
@click.pass_context
def check_prism(ctx, file):
    """Check the tower hypotheses; exit 1 when one fails."""
    _run(
        ctx,
        lambda reports, settings: reports.check_prism(
            load_spec_file(file), settings.levels
        ),
    )


@cli.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--fractional", is_flag=True, help="Fractional-exponent presentations")
@click.option("--tilt", is_flag=True)
@click.option("--pillars", is_flag=True)
@click.option("--axioms", is_flag=True)
@click.option("--force", is_flag=True, help="Build even if a hypothesis fails")
@click.pass_context
def tower(ctx, file, fractional, tilt, pillars, axioms, force):
    """Emit the tower of FILE's prism."""
    _run(
        ctx,
        lambda reports, settings: reports.tower(
            load_spec_file(file),
            settings.levels,
            fractional=fractional,
            tilt=tilt,
            pillars=pillars,
            axioms=axioms,
            force=force,
        ),
    )


@cli.command()
@click.argument("file", required=False, type=click.Path(dir_okay=False))
@click.option("--matrix", help="Generators as rows, e.g. '2; 3' or '1,0; 1,1'")
@click.option("--prime", type=int, default=2, show_default=True)
@click.pass_context
def toric(ctx, file, matrix, prime):
    """Toric ideal of a semigroup with its monomial Frobenius lift."""

    def action(reports, _):
        if matrix:
            return reports.toric(_parse_matrix(matrix), prime)
        if file is None:
            raise click.UsageError("give a spec file or --matrix")
        spec = load_spec_file(file)
        return reports.toric(spec.semigroup_spec().generators, spec.p)

    _run(ctx, action)


@cli.command()
@click.argument("file", type=click.Path(dir_okay=False))
@click.option("--kind", type=click.Choice([k.value for k in RootsKind]), default="p")
@click.pass_context
def roots(ctx, file, kind):
    """Adjoin p-power roots of p (--kind p) or of unity (--kind unity)."""
    _run(
        ctx,
        lambda reports, settings: reports.roots(
            load_spec_file(file), RootsKind(kind), settings.levels
        ),
    )


@cli.command()
@click.argument("directory", type=click.Path(file_okay=False, exists=True))
@click.pass_context
def corpus(ctx, directory):
    """Run every *.toml under DIRECTORY; exit with the worst exit code."""
    fmt = ctx.obj["format"]
    settings = ctx.obj["settings"]
    files = sorted(Path(directory).glob("*.toml"))
    worst = 0
    summary = {}
    for path in tqdm(files, desc="corpus", disable=fmt == "json"):
        # fresh services per file so resource usage is per file
        reports = ReportService(build_services(settings))
        try:
            report = reports.corpus_entry(load_spec_file(path), settings.levels)
            code = report.exit_code
        except PrismForgeError as e:
            e.log(logging.WARNING)
            code = e.exit_code
        summary[path.name] = code
        worst = max(worst, code)
    if fmt == "json":
        click.echo(json.dumps({"corpus": summary, "exit_code": worst}, indent=2))
    else:
        for name, code in summary.items():
            click.echo(f"{code}  {name}")
    sys.exit(worst)


@cli.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(host, port):
    """Run the certificate HTTP service."""
    import uvicorn

    uvicorn.run("app.main:app", host=host, port=port)


def main():
    cli(prog_name="prismforge")


if __name__ == "__main__":
    main()
