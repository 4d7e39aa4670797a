"""coopnet command line interface.

Exit codes: 0 success, 2 config/parse error, 3 I/O error.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .backbone import BackboneParams
from .coopetition import RevenueModelError
from .identity import AffiliationError
from .ingest import CommitLogError, convert_vcs_log, parse_commit_log
from .report import ConfigError, RunConfig, run_pipeline
from .slicing import ReleaseConfigError

EXIT_CONFIG = 2
EXIT_IO = 3

_CONFIG_ERRORS = (
    CommitLogError,
    AffiliationError,
    ReleaseConfigError,
    RevenueModelError,
    ConfigError,
    ValueError,
)


@click.group()
def main():
    """Reconstruct firm-level collaboration networks from commit history."""


@main.command()
@click.option("--log", "log_path", required=True, type=click.Path(path_type=Path))
@click.option("--releases", "releases_path", required=True, type=click.Path(path_type=Path))
@click.option("--affiliations", "affiliations_path", required=True, type=click.Path(path_type=Path))
@click.option("--firms", "firms_path", type=click.Path(path_type=Path), default=None)
@click.option("--revenue-models", "revenue_path", type=click.Path(path_type=Path), default=None)
@click.option("--backbone-k", type=int, default=5, show_default=True)
@click.option("--backbone-min-embeddedness", type=int, default=1, show_default=True)
@click.option("--community-min-size", type=int, default=3, show_default=True)
@click.option("--time-field", type=click.Choice(["committer", "author"]), default="committer",
              show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True,
              help="Number of release windows to process concurrently.")
@click.option("--out", "out_dir", required=True, type=click.Path(path_type=Path))
@click.option("--formats", default="graphml,dot,csv,json", show_default=True,
              help="Comma-separated subset of graphml,dot,csv,json.")
def analyze(log_path, releases_path, affiliations_path, firms_path, revenue_path,
            backbone_k, backbone_min_embeddedness, community_min_size, time_field,
            jobs, out_dir, formats):
    """Run the full pipeline and write analysis artifacts."""
    try:
        cfg = RunConfig(
            commit_log=log_path,
            releases=releases_path,
            affiliations=affiliations_path,
            firms=firms_path,
            revenue_models=revenue_path,
            backbone=BackboneParams(
                max_rank_k=backbone_k,
                min_embeddedness=backbone_min_embeddedness,
            ),
            community_min_size=community_min_size,
            time_field=time_field,
            formats=frozenset(f.strip() for f in formats.split(",") if f.strip()),
            jobs=jobs,
            out_dir=out_dir,
        )
        result = run_pipeline(cfg)
    except (*_CONFIG_ERRORS, FileNotFoundError) as exc:
        # a missing input file is a configuration problem, not an I/O failure
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(EXIT_IO)
    commits = result.summary["commits"]
    click.echo(
        f"analyzed {commits['analyzed']} commits across "
        f"{len(result.summary['windows'])} releases; "
        f"wrote {len(result.files_written)} files to {out_dir}"
    )


@main.command()
@click.option("--raw", "raw_path", required=True, type=click.Path(path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(path_type=Path))
def convert(raw_path, out_path):
    """Convert raw extraction-recipe output to the canonical NDJSON log."""
    try:
        raw = raw_path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(EXIT_IO)
    try:
        ndjson, merges_dropped = convert_vcs_log(raw)
    except CommitLogError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        out_path.write_text(ndjson, encoding="utf-8")
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(EXIT_IO)
    click.echo(f"wrote {sum(1 for _ in ndjson.splitlines())} records "
               f"({merges_dropped} merge commits dropped)")


@main.command()
@click.option("--log", "log_path", required=True, type=click.Path(path_type=Path))
def validate(log_path):
    """Parse a commit log and report acceptance, rejections, and fixes."""
    try:
        text = log_path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        sys.exit(EXIT_IO)
    _, report = parse_commit_log(text)
    click.echo(f"accepted: {report.accepted}")
    click.echo(f"rejected: {len(report.rejected)}")
    for line_number, reason in report.rejected:
        click.echo(f"  line {line_number}: {reason}")
    click.echo(f"cleaned: {len(report.cleaned)}")
    for sha, fix in report.cleaned:
        click.echo(f"  {sha[:12]}: {fix}")


if __name__ == "__main__":
    main()
