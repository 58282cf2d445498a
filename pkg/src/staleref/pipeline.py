"""End-to-end scan orchestration for current-state and full-history analysis."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .docdiscovery import ORIGIN_README, DiscoveryConfig, DocumentDescriptor, discover_documents
from .extraction import RegexCatalog, default_catalog, extract_elements
from .matching import MatchConfig, SourceScanner, classify_current
from .reporting import (
    MODE_CURRENT,
    MODE_HISTORY,
    Aggregates,
    Finding,
    ScanReport,
    UrlTemplates,
    build_finding_urls,
    compute_aggregates,
    sort_findings,
)
from .revgraph import (
    DocVersion,
    EmptyHistoryError,
    GitError,
    GitRepo,
    KIND_WIKI,
    MissingRepositoryError,
    Revision,
    RevisionSequence,
    link_source_to_docs,
    snapshot_for_doc,
)
from .timeline import (
    ElementTimeline,
    build_timeline,
    detect_episodes,
    episode_duration,
    is_count,
    is_positive,
)

DEFAULT_TIMEOUT_SECONDS = 86_400.0


class ScanTimeout(Exception):
    """Internal signal that the configured wall-clock budget ran out."""


class _Deadline:
    def __init__(self, seconds: float):
        self._at = time.monotonic() + seconds

    def expired(self) -> bool:
        return time.monotonic() >= self._at

    def check(self) -> None:
        if self.expired():
            raise ScanTimeout


@dataclass
class RunConfig:
    repo_path: str
    wiki_path: str | None = None
    branch: str | None = None
    catalog: RegexCatalog | None = None
    discovery: DiscoveryConfig = field(default_factory=DiscoveryConfig)
    exclude_globs: tuple[str, ...] = ()
    max_file_bytes: int = 10 * 1024 * 1024
    jobs: int = 1
    scan_time: int | None = None
    timeout_seconds: float = DEFAULT_TIMEOUT_SECONDS
    url_base: str | None = None
    strict_episodes: bool = False
    project_id: str | None = None

    def resolved_project_id(self) -> str:
        if self.project_id:
            return self.project_id
        name = Path(self.repo_path).name
        return name[:-4] if name.endswith(".git") else name


def _derive_url_base(repo: GitRepo) -> str | None:
    url = repo.remote_url()
    if not url:
        return None
    if url.startswith("git@") and ":" in url:
        host, _, path = url[4:].partition(":")
        url = f"https://{host}/{path}"
    if not url.startswith(("http://", "https://")):
        return None
    return url[:-4] if url.endswith(".git") else url


def _parallel_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(fn, items))


def _sorted_warnings(*warning_lists: list[dict]) -> list[dict]:
    merged: list[dict] = []
    for warnings in warning_lists:
        merged.extend(warnings)
    return sorted(merged, key=lambda w: json.dumps(w, sort_keys=True))


class _Project:
    """Opened repositories plus the shared derived state both modes need."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.source = GitRepo(config.repo_path)
        self.source_branch = self.source.resolve_branch(config.branch)
        self.source_seq = self.source.linearize_history(self.source_branch)
        self.warnings: list[dict] = []
        self.wiki: GitRepo | None = None
        self.wiki_branch: str | None = None
        self.wiki_seq: RevisionSequence | None = None
        if config.wiki_path:
            try:
                wiki = GitRepo(config.wiki_path)
                branch = wiki.resolve_branch(None)
                self.wiki_seq = wiki.linearize_history(branch, KIND_WIKI)
                self.wiki = wiki
                self.wiki_branch = branch
            except (MissingRepositoryError, EmptyHistoryError) as exc:
                self.warnings.append({"kind": "wiki_unavailable", "detail": str(exc)})
        self.catalog = config.catalog or default_catalog()
        templates_base = config.url_base or _derive_url_base(self.source)
        self.templates = UrlTemplates(base=templates_base)
        self.scan_time = (
            config.scan_time if config.scan_time is not None else int(time.time())
        )

    def close(self) -> None:
        self.source.close()
        if self.wiki is not None:
            self.wiki.close()

    def hosting(self, document: DocumentDescriptor) -> tuple[GitRepo, RevisionSequence, str]:
        if document.origin == ORIGIN_README:
            return self.source, self.source_seq, self.source_branch
        assert self.wiki is not None and self.wiki_seq is not None and self.wiki_branch
        return self.wiki, self.wiki_seq, self.wiki_branch

    def match_config(self, documents: list[DocumentDescriptor]) -> MatchConfig:
        # The analysed documents themselves never count as source instances.
        doc_paths = tuple(
            d.path for d in documents if d.origin == ORIGIN_README
        )
        return MatchConfig(
            exclude_globs=(".git/",) + doc_paths + tuple(self.config.exclude_globs),
            max_file_bytes=self.config.max_file_bytes,
        )

    def revision_by_sha(self, seq: RevisionSequence, sha: str) -> Revision:
        for rev in seq.revisions:
            if rev.sha == sha:
                return rev
        return seq.head


def run_scan(config: RunConfig) -> ScanReport:
    """Current-state scan: compare each document's references between its
    snapshot revision and the head of the source history."""
    project = _Project(config)
    deadline = _Deadline(config.timeout_seconds)
    try:
        head = project.source_seq.head
        wiki_tree = (
            project.wiki.tree_at(project.wiki_seq.head.sha)
            if project.wiki is not None
            else None
        )
        documents = discover_documents(
            project.source.tree_at(head.sha), wiki_tree, config.discovery
        )
        scanner = SourceScanner(project.source, project.match_config(documents))

        findings: list[Finding] = []
        partial = False
        try:
            for document in documents:
                deadline.check()
                repo, hosting_seq, branch = project.hosting(document)
                doc_text = repo.read_blob(hosting_seq.head.sha, document.path)
                refs = extract_elements(doc_text, project.catalog, document)
                if not refs:
                    continue
                touch = repo.last_touch(branch, document.path)
                if touch is None:
                    continue
                doc_version = DocVersion(
                    document, project.revision_by_sha(hosting_seq, touch[0]), doc_text
                )
                snapshot = snapshot_for_doc(doc_version, project.source_seq)

                def _count_pair(ref):
                    return (
                        scanner.count_instances(ref.text, snapshot),
                        scanner.count_instances(ref.text, head),
                    )

                counted = _parallel_map(_count_pair, refs, config.jobs)
                for ref, (snap_ic, cur_ic) in zip(refs, counted):
                    status = classify_current(snap_ic, cur_ic)
                    finding = Finding(
                        element_text=ref.text,
                        document=document,
                        status=status,
                        snapshot_sha=snapshot.sha,
                        snapshot_count=snap_ic.count,
                        current_sha=head.sha,
                        current_count=cur_ic.count,
                        evidence=tuple(
                            (path, line, "path-variant" if line == 0 else "text")
                            for path, line in snap_ic.matched_paths
                        ),
                        evidence_sha=snapshot.sha,
                        doc_sha=hosting_seq.head.sha,
                    )
                    finding.urls = build_finding_urls(finding, project.templates)
                    findings.append(finding)
        except ScanTimeout:
            partial = True

        findings = sort_findings(findings)
        report = ScanReport(
            project_id=config.resolved_project_id(),
            scan_time=project.scan_time,
            mode=MODE_CURRENT,
            findings=findings,
            warnings=_sorted_warnings(project.warnings, scanner.warnings),
            aggregates=compute_aggregates(findings),
            revisions=None,
            partial=partial,
        )
        return report
    finally:
        project.close()


def _union_listing(repo: GitRepo, seq: RevisionSequence) -> list[str]:
    paths: set[str] = set()
    for rev in seq.revisions:
        paths.update(repo.tree_at(rev.sha))
    return sorted(paths)


def run_history(config: RunConfig) -> ScanReport:
    """Full-history analysis producing symbolic timelines and episodes.

    Instance counts are primed newest-first so that when the timeout strikes,
    the partial output covers the most recent revisions.
    """
    project = _Project(config)
    deadline = _Deadline(config.timeout_seconds)
    try:
        source_seq = project.source_seq
        head = source_seq.head
        wiki_listing = (
            _union_listing(project.wiki, project.wiki_seq)
            if project.wiki is not None
            else None
        )
        documents = discover_documents(
            _union_listing(project.source, source_seq), wiki_listing, config.discovery
        )
        scanner = SourceScanner(project.source, project.match_config(documents))

        # Document side: dense version lists over each document's hosting
        # history, extraction cached per distinct blob.
        doc_text_cache: dict[str, str | None] = {}
        refs_by_blob: dict[str | None, frozenset[str]] = {None: frozenset()}
        rows: list[dict] = []
        n = len(source_seq.revisions)
        covered_from = n
        partial = False
        for document in documents:
            if deadline.expired():
                partial = True
                break
            repo, hosting_seq, _ = project.hosting(document)
            versions: list[DocVersion] = []
            refs_map: dict[tuple[str, str], frozenset[str]] = {}
            elements: set[str] = set()
            for rev in hosting_seq.revisions:
                blob = repo.blob_sha(rev.sha, document.path)
                if blob is None:
                    text = None
                    refs: frozenset[str] = frozenset()
                else:
                    if blob not in doc_text_cache:
                        doc_text_cache[blob] = repo.read_blob_bytes(blob).decode(
                            "utf-8", errors="replace"
                        )
                    text = doc_text_cache[blob]
                    if blob not in refs_by_blob:
                        refs_by_blob[blob] = frozenset(
                            ref.text
                            for ref in extract_elements(text, project.catalog, document)
                        )
                    refs = refs_by_blob[blob]
                versions.append(DocVersion(document, rev, text))
                refs_map[(document.path, rev.sha)] = refs
                elements.update(refs)
            if not elements:
                continue
            if document.origin == ORIGIN_README:
                pairs = list(zip(source_seq.revisions, versions))
            else:
                ordered = sorted(versions, key=lambda v: v.timestamp)
                pairs = link_source_to_docs(source_seq, ordered)
            refs_provider = lambda dv, _m=refs_map: _m[(dv.descriptor.path, dv.revision.sha)]
            for element in sorted(elements):
                rows.append(
                    {
                        "document": document,
                        "element": element,
                        "pairs": pairs,
                        "refs_provider": refs_provider,
                        "hosting_seq": hosting_seq,
                    }
                )

        # Count priming, newest revisions first.
        try:
            if partial:
                raise ScanTimeout
            for i in range(n - 1, -1, -1):
                deadline.check()

                def _prime(row, _i=i):
                    revision, doc_version = row["pairs"][_i]
                    if doc_version is None or doc_version.text is None:
                        return
                    if row["element"] not in row["refs_provider"](doc_version):
                        return
                    try:
                        scanner.count_instances(row["element"], revision)
                    except GitError:
                        pass
                _parallel_map(lambda r: _prime(r), rows, config.jobs)
                covered_from = i
        except ScanTimeout:
            partial = True

        findings: list[Finding] = []
        warnings_extra: list[dict] = []
        if partial:
            for row in rows:
                suffix = []
                for idx in range(covered_from, n):
                    revision, doc_version = row["pairs"][idx]
                    if doc_version is None or doc_version.text is None:
                        suffix.append(".")
                    elif row["element"] not in row["refs_provider"](doc_version):
                        suffix.append("-")
                    else:
                        suffix.append(
                            scanner.count_instances(row["element"], revision).count
                        )
                findings.append(
                    Finding(
                        element_text=row["element"],
                        document=row["document"],
                        status=None,
                        current_sha=head.sha,
                        symbols_suffix=suffix,
                    )
                )
        else:
            for row in rows:
                timeline = build_timeline(
                    row["element"],
                    row["document"],
                    row["pairs"],
                    lambda el, rev: scanner.count_instances(el, rev).count,
                    row["refs_provider"],
                )
                episodes = detect_episodes(timeline, strict=config.strict_episodes)
                for episode in episodes:
                    episode.duration_seconds = episode_duration(
                        episode, timeline.revisions, scan_time=project.scan_time
                    )
                    if not episode.ongoing and episode.duration_seconds < 0:
                        warnings_extra.append(
                            {
                                "kind": "negative_duration",
                                "element": row["element"],
                                "document": row["document"].path,
                                "start_ordinal": episode.start_ordinal,
                            }
                        )
                finding = _history_finding(row, timeline, episodes, head, scanner, project)
                findings.append(finding)

        findings = sort_findings(findings)
        report = ScanReport(
            project_id=config.resolved_project_id(),
            scan_time=project.scan_time,
            mode=MODE_HISTORY,
            findings=findings,
            warnings=_sorted_warnings(project.warnings, scanner.warnings, warnings_extra),
            aggregates=compute_aggregates(findings),
            revisions=source_seq.revisions,
            partial=partial,
            covered_from_ordinal=covered_from if partial else None,
        )
        return report
    finally:
        project.close()


def _history_finding(
    row: dict,
    timeline: ElementTimeline,
    episodes,
    head: Revision,
    scanner: SourceScanner,
    project: _Project,
) -> Finding:
    symbols = timeline.symbols
    current_count = symbols[-1] if symbols and is_count(symbols[-1]) else None
    evidence: tuple = ()
    evidence_sha = None
    for idx in range(len(symbols) - 1, -1, -1):
        if is_positive(symbols[idx]):
            instance = scanner.count_instances(row["element"], timeline.revisions[idx])
            evidence = tuple(
                (path, line, "path-variant" if line == 0 else "text")
                for path, line in instance.matched_paths
            )
            evidence_sha = timeline.revisions[idx].sha
            break
    hosting_seq = row["hosting_seq"]
    doc_sha = None
    hosting_repo = project.source if row["document"].origin == ORIGIN_README else project.wiki
    if hosting_repo is not None and hosting_repo.blob_sha(
        hosting_seq.head.sha, row["document"].path
    ):
        doc_sha = hosting_seq.head.sha
    finding = Finding(
        element_text=row["element"],
        document=row["document"],
        status=None,
        snapshot_sha=None,
        snapshot_count=None,
        current_sha=head.sha,
        current_count=current_count,
        evidence=evidence,
        evidence_sha=evidence_sha,
        doc_sha=doc_sha,
        timeline=timeline,
        episodes=episodes,
    )
    finding.urls = build_finding_urls(finding, project.templates)
    return finding
