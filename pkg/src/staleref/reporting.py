"""Report assembly and rendering: JSON, CSV, Markdown, and issue drafts."""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass, field

from .docdiscovery import ORIGIN_WIKI, DocumentDescriptor
from .matching import STATUS_OUTDATED
from .revgraph import Revision
from .timeline import (
    FIX_KINDS,
    ElementTimeline,
    FixEvent,
    OutdatedEpisode,
)

SCHEMA_VERSION = 1
MODE_CURRENT = "current"
MODE_HISTORY = "history"

MAX_HISTORY_TABLE_COLUMNS = 2000

FORMAT_JSON = "json"
FORMAT_CSV = "csv"
FORMAT_MARKDOWN = "md"


@dataclass(frozen=True)
class UrlTemplates:
    """Browse-URL templates; GitHub-shaped by default, never fetched."""

    base: str | None = None
    blob: str = "{base}/blob/{sha}/{path}#L{line}"
    blob_no_line: str = "{base}/blob/{sha}/{path}"
    wiki: str = "{base}/wiki/{page}/{sha}"
    commit: str = "{base}/commit/{sha}"

    def document_url(self, document: DocumentDescriptor, sha: str) -> str | None:
        if not self.base:
            return None
        if document.origin == ORIGIN_WIKI:
            return self.wiki.format(base=self.base, page=document.page_name, sha=sha)
        return self.blob_no_line.format(base=self.base, sha=sha, path=document.path)

    def source_url(self, sha: str, path: str, line: int) -> str | None:
        if not self.base:
            return None
        if line > 0:
            return self.blob.format(base=self.base, sha=sha, path=path, line=line)
        return self.blob_no_line.format(base=self.base, sha=sha, path=path)

    def commit_url(self, sha: str) -> str | None:
        if not self.base:
            return None
        return self.commit.format(base=self.base, sha=sha)


@dataclass
class Finding:
    """One (element, document) result.

    Current-mode findings carry a status and the snapshot/current counts;
    history-mode findings carry the timeline and its episodes instead (status
    is None there). ``evidence`` lists (path, line, kind) for instances at the
    evidence revision, where kind is "text" or "path-variant".
    """

    element_text: str
    document: DocumentDescriptor
    status: str | None
    snapshot_sha: str | None = None
    snapshot_count: int | None = None
    current_sha: str | None = None
    current_count: int | None = None
    evidence: tuple[tuple[str, int, str], ...] = ()
    evidence_sha: str | None = None
    doc_sha: str | None = None
    urls: dict | None = None
    timeline: ElementTimeline | None = None
    episodes: list[OutdatedEpisode] | None = None
    symbols_suffix: list | None = None

    @property
    def outdated(self) -> bool:
        """Ever-outdated in history mode, currently outdated in current mode."""
        if self.episodes is not None:
            return bool(self.episodes)
        return self.status == STATUS_OUTDATED

    @property
    def currently_outdated(self) -> bool:
        if self.episodes is not None:
            return any(ep.ongoing for ep in self.episodes)
        return self.status == STATUS_OUTDATED


@dataclass
class Aggregates:
    elements_total: int = 0
    elements_outdated: int = 0
    documents_total: int = 0
    documents_outdated: int = 0
    projects_total: int = 0
    projects_outdated: int = 0
    fix_kind_counts: dict = field(
        default_factory=lambda: {kind: 0 for kind in FIX_KINDS}
    )
    reoutdated_count: int = 0
    duration_stats: dict | None = None
    survival_points: list = field(default_factory=list)

    @property
    def project_outdated(self) -> bool:
        return self.projects_outdated > 0


@dataclass
class ScanReport:
    project_id: str
    scan_time: int
    mode: str
    findings: list[Finding]
    warnings: list[dict]
    aggregates: Aggregates
    revisions: tuple[Revision, ...] | None = None
    partial: bool = False
    covered_from_ordinal: int | None = None


def sort_findings(findings: list[Finding]) -> list[Finding]:
    return sorted(
        findings, key=lambda f: (f.document.origin, f.document.path, f.element_text)
    )


# -- aggregates ---------------------------------------------------------------


def _episode_list(findings: list[Finding]) -> list[OutdatedEpisode]:
    episodes: list[OutdatedEpisode] = []
    for finding in findings:
        if finding.episodes:
            episodes.extend(finding.episodes)
    return episodes


def compute_aggregates(findings: list[Finding]) -> Aggregates:
    """Totals over one report's findings; pure so it can be recomputed from
    parsed output and compared against the in-process result."""
    agg = Aggregates(projects_total=1)
    agg.elements_total = len(findings)
    agg.elements_outdated = sum(1 for f in findings if f.outdated)
    documents = {(f.document.origin, f.document.path) for f in findings}
    outdated_docs = {
        (f.document.origin, f.document.path) for f in findings if f.outdated
    }
    agg.documents_total = len(documents)
    agg.documents_outdated = len(outdated_docs)
    agg.projects_outdated = 1 if outdated_docs else 0

    episodes = _episode_list(findings)
    for episode in episodes:
        if episode.fix is not None:
            agg.fix_kind_counts[episode.fix.kind] += 1
    pairs_with_episode = {
        (f.document.origin, f.document.path, f.element_text)
        for f in findings
        if f.episodes
    }
    agg.reoutdated_count = len(episodes) - len(pairs_with_episode)

    durations = [
        ep.duration_seconds for ep in episodes if ep.duration_seconds is not None
    ]
    if durations:
        agg.duration_stats = {
            "min": min(durations),
            "median": statistics.median(durations),
            "mean": statistics.fmean(durations),
            "max": max(durations),
        }
    fixed_positive = [
        ep
        for ep in episodes
        if not ep.ongoing
        and ep.duration_seconds is not None
        and ep.duration_seconds > 0
    ]
    if fixed_positive:
        grid = sorted({0, *(ep.duration_seconds for ep in fixed_positive)})
        from .timeline import survival_curve

        agg.survival_points = [
            [d, f] for d, f in survival_curve(fixed_positive, grid)
        ]
    return agg


def aggregate_corpus(reports: list[ScanReport]) -> Aggregates:
    """Pool findings across reports from distinct projects."""
    agg = Aggregates(projects_total=len(reports))
    all_episodes: list[OutdatedEpisode] = []
    reoutdated = 0
    for report in reports:
        per = compute_aggregates(report.findings)
        agg.elements_total += per.elements_total
        agg.elements_outdated += per.elements_outdated
        agg.documents_total += per.documents_total
        agg.documents_outdated += per.documents_outdated
        agg.projects_outdated += per.projects_outdated
        reoutdated += per.reoutdated_count
        all_episodes.extend(_episode_list(report.findings))
    agg.reoutdated_count = reoutdated
    for episode in all_episodes:
        if episode.fix is not None:
            agg.fix_kind_counts[episode.fix.kind] += 1
    durations = [
        ep.duration_seconds for ep in all_episodes if ep.duration_seconds is not None
    ]
    if durations:
        agg.duration_stats = {
            "min": min(durations),
            "median": statistics.median(durations),
            "mean": statistics.fmean(durations),
            "max": max(durations),
        }
    fixed_positive = [
        ep
        for ep in all_episodes
        if not ep.ongoing
        and ep.duration_seconds is not None
        and ep.duration_seconds > 0
    ]
    if fixed_positive:
        grid = sorted({0, *(ep.duration_seconds for ep in fixed_positive)})
        from .timeline import survival_curve

        agg.survival_points = [[d, f] for d, f in survival_curve(fixed_positive, grid)]
    return agg


# -- serialization --------------------------------------------------------------


def _rfc3339(epoch: int) -> str:
    from datetime import datetime, timezone

    return datetime.fromtimestamp(epoch, tz=timezone.utc).isoformat()


def _document_dict(document: DocumentDescriptor) -> dict:
    return {"origin": document.origin, "path": document.path, "format": document.format}


def _parse_document(data: dict) -> DocumentDescriptor:
    return DocumentDescriptor(data["origin"], data["path"], data["format"])


def _episode_dict(episode: OutdatedEpisode) -> dict:
    fix = None
    if episode.fix is not None:
        fix = {
            "kind": episode.fix.kind,
            "at_ordinal": episode.fix.at_ordinal,
            "at_sha": episode.fix.at_sha,
            "at_timestamp": episode.fix.at_timestamp,
        }
    return {
        "start_ordinal": episode.start_ordinal,
        "end_ordinal": episode.end_ordinal,
        "fix": fix,
        "duration_seconds": episode.duration_seconds,
    }


def _parse_episode(data: dict, element_text: str, document: DocumentDescriptor) -> OutdatedEpisode:
    fix = None
    if data.get("fix"):
        fd = data["fix"]
        fix = FixEvent(fd["kind"], fd["at_ordinal"], fd["at_sha"], fd["at_timestamp"])
    return OutdatedEpisode(
        element_text,
        document,
        data["start_ordinal"],
        data["end_ordinal"],
        fix=fix,
        duration_seconds=data.get("duration_seconds"),
    )


def _finding_dict(finding: Finding) -> dict:
    data: dict = {
        "element_text": finding.element_text,
        "document": _document_dict(finding.document),
        "status": finding.status,
        "snapshot_sha": finding.snapshot_sha,
        "snapshot_count": finding.snapshot_count,
        "current_sha": finding.current_sha,
        "current_count": finding.current_count,
        "evidence": [
            {"path": path, "line": line, "kind": kind}
            for path, line, kind in finding.evidence
        ],
        "evidence_sha": finding.evidence_sha,
        "doc_sha": finding.doc_sha,
        "urls": finding.urls,
        "symbols": list(finding.timeline.symbols) if finding.timeline else None,
        "timeline_partial": finding.timeline.partial if finding.timeline else None,
        "failed_ordinals": list(finding.timeline.failed_ordinals)
        if finding.timeline
        else None,
        "episodes": [_episode_dict(ep) for ep in finding.episodes]
        if finding.episodes is not None
        else None,
        "symbols_suffix": finding.symbols_suffix,
    }
    return data


def _parse_finding(data: dict, revisions: tuple[Revision, ...] | None) -> Finding:
    document = _parse_document(data["document"])
    timeline = None
    if data.get("symbols") is not None and revisions is not None:
        timeline = ElementTimeline(
            data["element_text"],
            document,
            list(data["symbols"]),
            revisions,
            partial=bool(data.get("timeline_partial")),
            failed_ordinals=list(data.get("failed_ordinals") or []),
        )
    episodes = None
    if data.get("episodes") is not None:
        episodes = [
            _parse_episode(ep, data["element_text"], document)
            for ep in data["episodes"]
        ]
    return Finding(
        element_text=data["element_text"],
        document=document,
        status=data.get("status"),
        snapshot_sha=data.get("snapshot_sha"),
        snapshot_count=data.get("snapshot_count"),
        current_sha=data.get("current_sha"),
        current_count=data.get("current_count"),
        evidence=tuple(
            (e["path"], e["line"], e["kind"]) for e in data.get("evidence", [])
        ),
        evidence_sha=data.get("evidence_sha"),
        doc_sha=data.get("doc_sha"),
        urls=data.get("urls"),
        timeline=timeline,
        episodes=episodes,
        symbols_suffix=data.get("symbols_suffix"),
    )


def _aggregates_dict(agg: Aggregates) -> dict:
    return {
        "elements_total": agg.elements_total,
        "elements_outdated": agg.elements_outdated,
        "documents_total": agg.documents_total,
        "documents_outdated": agg.documents_outdated,
        "projects_total": agg.projects_total,
        "projects_outdated": agg.projects_outdated,
        "fix_kind_counts": {kind: agg.fix_kind_counts.get(kind, 0) for kind in FIX_KINDS},
        "reoutdated_count": agg.reoutdated_count,
        "duration_stats": agg.duration_stats,
        "survival_points": agg.survival_points,
    }


def _parse_aggregates(data: dict) -> Aggregates:
    return Aggregates(
        elements_total=data["elements_total"],
        elements_outdated=data["elements_outdated"],
        documents_total=data["documents_total"],
        documents_outdated=data["documents_outdated"],
        projects_total=data["projects_total"],
        projects_outdated=data["projects_outdated"],
        fix_kind_counts={k: data["fix_kind_counts"].get(k, 0) for k in FIX_KINDS},
        reoutdated_count=data["reoutdated_count"],
        duration_stats=data.get("duration_stats"),
        survival_points=[list(p) for p in data.get("survival_points", [])],
    )


def report_to_dict(report: ScanReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "project": report.project_id,
        "scan_time": _rfc3339(report.scan_time),
        "scan_time_epoch": report.scan_time,
        "mode": report.mode,
        "partial": report.partial,
        "covered_from_ordinal": report.covered_from_ordinal,
        "revisions": [
            {"sha": r.sha, "timestamp": r.timestamp, "ordinal": r.ordinal}
            for r in report.revisions
        ]
        if report.revisions is not None
        else None,
        "findings": [_finding_dict(f) for f in report.findings],
        "warnings": report.warnings,
        "aggregates": _aggregates_dict(report.aggregates),
    }


def parse_report(text: str) -> ScanReport:
    """Inverse of the JSON rendering; findings round-trip exactly."""
    data = json.loads(text)
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema_version: {version!r}")
    revisions = None
    if data.get("revisions") is not None:
        revisions = tuple(
            Revision(r["sha"], r["timestamp"], r["ordinal"]) for r in data["revisions"]
        )
    findings = [_parse_finding(f, revisions) for f in data["findings"]]
    return ScanReport(
        project_id=data["project"],
        scan_time=data["scan_time_epoch"],
        mode=data["mode"],
        findings=findings,
        warnings=data.get("warnings", []),
        aggregates=_parse_aggregates(data["aggregates"]),
        revisions=revisions,
        partial=bool(data.get("partial")),
        covered_from_ordinal=data.get("covered_from_ordinal"),
    )


# -- rendering -------------------------------------------------------------------


def render_findings(report: ScanReport, fmt: str = FORMAT_JSON) -> str:
    if fmt == FORMAT_JSON:
        return json.dumps(report_to_dict(report), indent=2) + "\n"
    if fmt == FORMAT_CSV:
        return _render_findings_csv(report)
    if fmt == FORMAT_MARKDOWN:
        return _render_findings_markdown(report)
    raise ValueError(f"unknown output format: {fmt!r}")


def _render_findings_csv(report: ScanReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "element",
            "origin",
            "document",
            "format",
            "status",
            "snapshot_sha",
            "snapshot_count",
            "current_sha",
            "current_count",
            "episodes",
            "evidence",
        ]
    )
    for f in report.findings:
        evidence = ";".join(f"{p}:{ln}:{kind}" for p, ln, kind in f.evidence)
        writer.writerow(
            [
                f.element_text,
                f.document.origin,
                f.document.path,
                f.document.format,
                f.status if f.status is not None else "",
                f.snapshot_sha or "",
                f.snapshot_count if f.snapshot_count is not None else "",
                f.current_sha or "",
                f.current_count if f.current_count is not None else "",
                len(f.episodes) if f.episodes is not None else "",
                evidence,
            ]
        )
    return buf.getvalue()


def _render_findings_markdown(report: ScanReport) -> str:
    lines = [
        f"# Reference scan of {report.project_id}",
        "",
        f"* mode: {report.mode}",
        f"* scan time: {_rfc3339(report.scan_time)}",
        f"* findings: {len(report.findings)} "
        f"({report.aggregates.elements_outdated} outdated)",
    ]
    if report.partial:
        lines.append("* **partial results** (run hit its timeout)")
    lines.append("")
    for f in report.findings:
        marker = "**outdated**" if f.outdated else (f.status or "history")
        lines.append(f"- `{f.element_text}` in `{f.document.path}` ({f.document.origin}): {marker}")
        if f.status is not None:
            lines.append(
                f"  - snapshot count {f.snapshot_count} at `{(f.snapshot_sha or '')[:10]}`, "
                f"current count {f.current_count} at `{(f.current_sha or '')[:10]}`"
            )
        if f.episodes:
            for ep in f.episodes:
                if ep.ongoing:
                    lines.append(f"  - outdated since ordinal {ep.start_ordinal}, not fixed")
                else:
                    lines.append(
                        f"  - outdated at ordinal {ep.start_ordinal}, fixed by "
                        f"{ep.fix.kind} at ordinal {ep.end_ordinal}"
                    )
    lines.append("")
    return "\n".join(lines)


def render_history_table(timelines: list[ElementTimeline]) -> str:
    """CSV table with one row per (element, document) and one column per revision.

    All timelines must describe the same revision sequence. Revision ordinals
    R1..Rn head the columns and the sha behind each ordinal is carried in
    leading comment lines.
    """
    if not timelines:
        return "element,origin,document\n"
    shas = tuple(r.sha for r in timelines[0].revisions)
    for tl in timelines[1:]:
        if tuple(r.sha for r in tl.revisions) != shas:
            raise ValueError("timelines describe different revision sequences")
    if len(shas) > MAX_HISTORY_TABLE_COLUMNS:
        raise ValueError(
            f"history table limited to {MAX_HISTORY_TABLE_COLUMNS} revision columns; "
            f"got {len(shas)} (use the JSON report instead)"
        )
    buf = io.StringIO()
    for i, rev in enumerate(timelines[0].revisions):
        buf.write(f"# R{i + 1} {rev.sha} {rev.timestamp}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["element", "origin", "document"] + [f"R{i + 1}" for i in range(len(shas))]
    )
    def _key(tl: ElementTimeline):
        doc = tl.document
        return (doc.origin if doc else "", doc.path if doc else "", tl.element_text)

    for tl in sorted(timelines, key=_key):
        doc = tl.document
        writer.writerow(
            [
                tl.element_text,
                doc.origin if doc else "",
                doc.path if doc else "",
                *[str(sym) for sym in tl.symbols],
            ]
        )
    return buf.getvalue()


def render_issue_draft(
    findings: list[Finding],
    project_id: str = "",
    templates: UrlTemplates | None = None,
) -> str:
    """Markdown issue text covering the currently outdated findings.

    Raises ValueError when nothing is outdated; an empty issue would only be
    noise for maintainers.
    """
    templates = templates or UrlTemplates()
    outdated = [f for f in findings if f.currently_outdated]
    if not outdated:
        raise ValueError("no outdated findings to draft an issue for")
    title = "Outdated code references in the documentation"
    if project_id:
        title += f" of {project_id}"
    lines = [
        f"# {title}",
        "",
        "The references below no longer match anything in the source tree,",
        "although each of them did when its document was last updated.",
        "They may confuse readers until the documentation is adjusted.",
        "",
    ]
    for f in outdated:
        doc_url = templates.document_url(f.document, f.doc_sha) if f.doc_sha else None
        if doc_url:
            lines.append(f"- `{f.element_text}` in [{f.document.path}]({doc_url})")
        else:
            lines.append(f"- `{f.element_text}` in `{f.document.path}`")
        if f.evidence and f.evidence_sha:
            path, line, kind = f.evidence[0]
            src_url = templates.source_url(f.evidence_sha, path, line)
            location = f"{path}:{line}" if line > 0 else path
            if kind == "path-variant":
                location = f"{path} (referenced as a path)"
            if src_url:
                lines.append(f"  - last matched [{location}]({src_url})")
            else:
                lines.append(f"  - last matched {location} at {f.evidence_sha[:10]}")
        deleting_sha = _deleting_sha(f)
        if deleting_sha:
            url = templates.commit_url(deleting_sha)
            if url:
                lines.append(f"  - instances disappeared in [{deleting_sha[:10]}]({url})")
            else:
                lines.append(f"  - instances disappeared in {deleting_sha[:10]}")
    lines.append("")
    return "\n".join(lines)


def _deleting_sha(finding: Finding) -> str | None:
    """Commit in which the last instances vanished, when the timeline shows it."""
    if finding.timeline is None or finding.episodes is None:
        return None
    ongoing = [ep for ep in finding.episodes if ep.ongoing]
    if not ongoing:
        return None
    return finding.timeline.revisions[ongoing[-1].start_ordinal].sha


def build_finding_urls(finding: Finding, templates: UrlTemplates) -> dict | None:
    if not templates.base:
        return None
    urls: dict = {}
    if finding.doc_sha:
        doc_url = templates.document_url(finding.document, finding.doc_sha)
        if doc_url:
            urls["document"] = doc_url
    if finding.evidence and finding.evidence_sha:
        path, line, _ = finding.evidence[0]
        src = templates.source_url(finding.evidence_sha, path, line)
        if src:
            urls["evidence"] = src
    deleting = _deleting_sha(finding)
    if deleting:
        urls["deleting_commit"] = templates.commit_url(deleting)
    return urls or None
