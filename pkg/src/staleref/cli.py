"""Command-line interface.

Subcommands: fetch, scan, history, stats, dump-catalog. Every option can also
be supplied through a STALEREF_* environment variable or a JSON config file;
explicit flags win over the environment, which wins over the file.

Exit codes: 0 no outdated references, 1 outdated references found, 2 error,
3 timed out (partial report still written).
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
from datetime import datetime, timezone
from pathlib import Path

from .docdiscovery import DiscoveryConfig
from .extraction import CatalogError, DEFAULT_CATALOG_TEXT, load_catalog
from .pipeline import DEFAULT_TIMEOUT_SECONDS, RunConfig, run_history, run_scan
from .reporting import (
    FORMAT_CSV,
    FORMAT_JSON,
    FORMAT_MARKDOWN,
    UrlTemplates,
    _aggregates_dict,
    aggregate_corpus,
    parse_report,
    render_findings,
    render_history_table,
    render_issue_draft,
)
from .revgraph import GitError

ENV_PREFIX = "STALEREF_"

EXIT_CLEAN = 0
EXIT_OUTDATED = 1
EXIT_ERROR = 2
EXIT_TIMEOUT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="staleref",
        description="Find documentation references to code elements that no "
        "longer exist in the source tree.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fetch = sub.add_parser("fetch", help="clone a repository (and optionally its wiki)")
    fetch.add_argument("url")
    fetch.add_argument("--dest", default=".", help="directory to clone into")
    fetch.add_argument("--with-wiki", action="store_true", help="also clone <url>.wiki")

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--repo", help="path to the source clone")
    shared.add_argument("--wiki", help="path to the wiki clone, 'auto', or 'none'")
    shared.add_argument("--branch", help="source branch (default: checked-out branch)")
    shared.add_argument("--regex-file", help="rule catalog file replacing the built-in one")
    shared.add_argument(
        "--exclude", action="append", help="exclude glob for source scanning (repeatable)"
    )
    shared.add_argument("--format", choices=[FORMAT_JSON, FORMAT_CSV, FORMAT_MARKDOWN])
    shared.add_argument("--out", help="write the report here instead of stdout")
    shared.add_argument("--timeout", type=float, help="wall-clock budget in seconds")
    shared.add_argument("--max-file-bytes", type=int, help="skip source files larger than this")
    shared.add_argument("--jobs", type=int, help="worker threads (default: cpu count)")
    shared.add_argument(
        "--scan-time", help="pin the scan timestamp (epoch seconds or RFC 3339)"
    )
    shared.add_argument("--url-base", help="base URL for browse links in reports")
    shared.add_argument("--readme-glob", help="root-level README pattern")
    shared.add_argument(
        "--extra-doc-glob",
        action="append",
        help="treat matching source files as documentation too (repeatable)",
    )
    shared.add_argument(
        "--strict-episodes",
        action="store_true",
        default=None,
        help="only open an episode when the reference was in sync immediately before",
    )
    shared.add_argument(
        "--issue-draft", help="also write a Markdown issue draft here ('-' for stdout)"
    )
    shared.add_argument("--config", help="JSON config file with option defaults")

    sub.add_parser(
        "scan",
        parents=[shared],
        help="compare each document's references between its snapshot and head",
    )
    sub.add_parser(
        "history",
        parents=[shared],
        help="full-history timelines, outdated episodes, and fix analysis",
    )

    stats = sub.add_parser("stats", help="pool aggregates over saved JSON reports")
    stats.add_argument("reports", nargs="+", help="report files produced by scan/history")
    stats.add_argument("--format", choices=[FORMAT_JSON, FORMAT_CSV, FORMAT_MARKDOWN])
    stats.add_argument("--out")

    dump = sub.add_parser("dump-catalog", help="print the built-in rule catalog")
    dump.add_argument("--out")

    return parser


def _load_config_file(args) -> dict:
    path = getattr(args, "config", None) or os.environ.get(ENV_PREFIX + "CONFIG")
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config file must hold a JSON object")
    return data


def _opt(args, file_cfg: dict, name: str, default=None, cast=None, is_list: bool = False):
    """Flag > environment > config file > default."""
    value = getattr(args, name, None)
    if value in (None, []):
        env = os.environ.get(ENV_PREFIX + name.upper())
        if env is not None:
            value = env.split(",") if is_list else env
        elif name in file_cfg:
            value = file_cfg[name]
    if value in (None, []):
        return default
    if is_list and isinstance(value, str):
        value = [value]
    if cast is not None:
        value = [cast(v) for v in value] if is_list else cast(value)
    return value


def _parse_scan_time(value) -> int:
    if isinstance(value, int):
        return value
    text = str(value).strip()
    try:
        return int(text)
    except ValueError:
        pass
    dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def _truthy(value) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("1", "true", "yes", "on")


def _resolve_wiki(repo_path: str, wiki_opt: str | None) -> str | None:
    wiki_opt = wiki_opt or "auto"
    if wiki_opt == "none":
        return None
    if wiki_opt == "auto":
        candidate = Path(str(Path(repo_path)) + ".wiki")
        return str(candidate) if candidate.is_dir() else None
    return wiki_opt


def _write_output(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _run_analysis(args, mode: str) -> int:
    file_cfg = _load_config_file(args)
    repo = _opt(args, file_cfg, "repo")
    if not repo:
        print("error: --repo is required (flag, STALEREF_REPO, or config file)", file=sys.stderr)
        return EXIT_ERROR

    catalog = None
    regex_file = _opt(args, file_cfg, "regex_file")
    if regex_file:
        catalog = load_catalog(Path(regex_file).read_text(encoding="utf-8"), version=regex_file)

    scan_time = _opt(args, file_cfg, "scan_time")
    discovery = DiscoveryConfig(
        readme_glob=_opt(args, file_cfg, "readme_glob", default="README*"),
        extra_doc_globs=tuple(_opt(args, file_cfg, "extra_doc_glob", default=[], is_list=True)),
    )
    config = RunConfig(
        repo_path=repo,
        wiki_path=_resolve_wiki(repo, _opt(args, file_cfg, "wiki")),
        branch=_opt(args, file_cfg, "branch"),
        catalog=catalog,
        discovery=discovery,
        exclude_globs=tuple(_opt(args, file_cfg, "exclude", default=[], is_list=True)),
        max_file_bytes=_opt(
            args, file_cfg, "max_file_bytes", default=10 * 1024 * 1024, cast=int
        ),
        jobs=_opt(args, file_cfg, "jobs", default=os.cpu_count() or 1, cast=int),
        scan_time=_parse_scan_time(scan_time) if scan_time is not None else None,
        timeout_seconds=_opt(
            args, file_cfg, "timeout", default=DEFAULT_TIMEOUT_SECONDS, cast=float
        ),
        url_base=_opt(args, file_cfg, "url_base"),
        strict_episodes=_truthy(_opt(args, file_cfg, "strict_episodes", default=False)),
    )

    report = run_history(config) if mode == "history" else run_scan(config)

    fmt = _opt(args, file_cfg, "format", default=FORMAT_JSON)
    if mode == "history" and fmt == FORMAT_CSV and not report.partial:
        timelines = [f.timeline for f in report.findings if f.timeline is not None]
        try:
            text = render_history_table(timelines)
        except ValueError as exc:
            print(f"warning: {exc}; emitting JSON", file=sys.stderr)
            text = render_findings(report, FORMAT_JSON)
    else:
        text = render_findings(report, fmt)
    _write_output(text, _opt(args, file_cfg, "out"))

    draft_target = _opt(args, file_cfg, "issue_draft")
    if draft_target:
        outdated = [f for f in report.findings if f.currently_outdated]
        if outdated:
            draft = render_issue_draft(
                outdated,
                project_id=report.project_id,
                templates=UrlTemplates(base=config.url_base),
            )
            _write_output(draft, draft_target)
        else:
            print("note: no outdated findings, skipping issue draft", file=sys.stderr)

    if report.partial:
        return EXIT_TIMEOUT
    if any(f.outdated for f in report.findings):
        return EXIT_OUTDATED
    return EXIT_CLEAN


def _cmd_fetch(args) -> int:
    url = args.url.rstrip("/")
    name = url.rsplit("/", 1)[-1]
    if name.endswith(".git"):
        name = name[:-4]
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    target = dest / name
    clone = subprocess.run(
        ["git", "clone", "--quiet", args.url, str(target)], capture_output=True, text=True
    )
    if clone.returncode != 0:
        print(f"error: clone failed: {clone.stderr.strip()}", file=sys.stderr)
        return EXIT_ERROR
    print(target)
    if args.with_wiki:
        base = url[:-4] if url.endswith(".git") else url
        wiki_url = base + ".wiki"
        wiki_target = dest / (name + ".wiki")
        wiki = subprocess.run(
            ["git", "clone", "--quiet", wiki_url, str(wiki_target)],
            capture_output=True,
            text=True,
        )
        if wiki.returncode != 0:
            print(f"warning: wiki clone failed: {wiki.stderr.strip()}", file=sys.stderr)
        else:
            print(wiki_target)
    return EXIT_CLEAN


def _cmd_stats(args) -> int:
    reports = []
    for path in args.reports:
        try:
            reports.append(parse_report(Path(path).read_text(encoding="utf-8")))
        except (OSError, ValueError) as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return EXIT_ERROR
    agg = _aggregates_dict(aggregate_corpus(reports))
    fmt = args.format or FORMAT_JSON
    if fmt == FORMAT_JSON:
        text = json.dumps(agg, indent=2) + "\n"
    elif fmt == FORMAT_CSV:
        keys = [k for k in agg if k not in ("fix_kind_counts", "duration_stats", "survival_points")]
        text = ",".join(keys) + "\n" + ",".join(str(agg[k]) for k in keys) + "\n"
    else:
        lines = ["# Pooled aggregates", ""]
        lines += [f"* {key}: {value}" for key, value in agg.items()]
        text = "\n".join(lines) + "\n"
    _write_output(text, args.out)
    return EXIT_CLEAN


def _cmd_dump_catalog(args) -> int:
    _write_output(DEFAULT_CATALOG_TEXT, args.out)
    return EXIT_CLEAN


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fetch":
            return _cmd_fetch(args)
        if args.command == "scan":
            return _run_analysis(args, "scan")
        if args.command == "history":
            return _run_analysis(args, "history")
        if args.command == "stats":
            return _cmd_stats(args)
        if args.command == "dump-catalog":
            return _cmd_dump_catalog(args)
        parser.error(f"unknown command {args.command!r}")
    except (GitError, CatalogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
