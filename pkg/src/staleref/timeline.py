"""Symbolic timelines of an element reference across a source history.

Each source revision gets one symbol for a given (element, document) pair:

* ``"."``  the document did not exist at that revision (DocAbsent),
* ``"-"``  the document existed but did not reference the element,
* ``0``    the document referenced the element and nothing in the source
           matched it (the reference was outdated at that revision),
* ``n>0``  the document referenced the element and the source matched n times.

An outdated episode is a maximal run of zeros that has some positive count
anywhere earlier in the timeline. Zeros separated only by DocAbsent symbols
belong to the same episode: a document that briefly vanished and came back
with the reference still dangling was never fixed in between. An episode that
does not reach the final revision ends at the first symbol after its zeros,
and that symbol tells us how it was fixed: the document was deleted, the
document was updated, or matching source code came (back) into existence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from .docdiscovery import DocumentDescriptor
from .revgraph import DocVersion, Revision

DOC_ABSENT = "."
NO_REFERENCE = "-"

Symbol = Union[int, str]

FIX_DOC_DELETE = "doc_delete"
FIX_DOC_UPDATE = "doc_update"
FIX_SOURCE_CHANGE = "source_change"
FIX_KINDS = (FIX_DOC_DELETE, FIX_DOC_UPDATE, FIX_SOURCE_CHANGE)


def is_count(symbol: Symbol) -> bool:
    return isinstance(symbol, int) and not isinstance(symbol, bool)


def is_zero(symbol: Symbol) -> bool:
    return is_count(symbol) and symbol == 0


def is_positive(symbol: Symbol) -> bool:
    return is_count(symbol) and symbol > 0


def validate_symbol(symbol: Symbol) -> None:
    if is_count(symbol):
        if symbol < 0:
            raise ValueError(f"counts cannot be negative: {symbol}")
    elif symbol not in (DOC_ABSENT, NO_REFERENCE):
        raise ValueError(f"not a timeline symbol: {symbol!r}")


def render_symbol(symbol: Symbol) -> str:
    return str(symbol)


@dataclass(frozen=True)
class FixEvent:
    kind: str
    at_ordinal: int
    at_sha: str
    at_timestamp: int

    def __post_init__(self) -> None:
        if self.kind not in FIX_KINDS:
            raise ValueError(f"unknown fix kind: {self.kind!r}")


@dataclass
class OutdatedEpisode:
    element_text: str
    document: DocumentDescriptor | None
    start_ordinal: int
    end_ordinal: int | None
    fix: FixEvent | None = None
    duration_seconds: int | None = None

    @property
    def ongoing(self) -> bool:
        return self.end_ordinal is None


@dataclass
class ElementTimeline:
    """Symbols for one (element, document) pair, aligned with the source history.

    ``revisions`` is the linearized source sequence the symbols describe;
    ``symbols[i]`` belongs to ``revisions[i]``. When the counting backend
    failed at some revision the timeline is marked partial and the affected
    ordinals are listed; those positions carry a DocAbsent symbol so they can
    never fabricate an outdated stretch on their own.
    """

    element_text: str
    document: DocumentDescriptor | None
    symbols: tuple[Symbol, ...]
    revisions: tuple[Revision, ...]
    partial: bool = False
    failed_ordinals: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        self.symbols = tuple(self.symbols)
        self.revisions = tuple(self.revisions)
        self.failed_ordinals = tuple(self.failed_ordinals)
        if len(self.symbols) != len(self.revisions):
            raise ValueError("one symbol per revision required")
        for symbol in self.symbols:
            validate_symbol(symbol)


def build_timeline(
    element_text: str,
    document: DocumentDescriptor | None,
    linked_pairs: list[tuple[Revision, DocVersion | None]],
    counts_provider: Callable[[str, Revision], int],
    refs_provider: Callable[[DocVersion], frozenset[str]],
) -> ElementTimeline:
    """Derive the symbol sequence for one element from linked (revision, doc) pairs.

    ``refs_provider`` maps a document version to the set of element texts it
    references; ``counts_provider`` counts source instances at a revision. A
    counting failure marks the timeline partial instead of aborting the run.
    """
    symbols: list[Symbol] = []
    failed: list[int] = []
    for ordinal, (revision, doc_version) in enumerate(linked_pairs):
        if doc_version is None or doc_version.text is None:
            symbols.append(DOC_ABSENT)
            continue
        if element_text not in refs_provider(doc_version):
            symbols.append(NO_REFERENCE)
            continue
        try:
            count = int(counts_provider(element_text, revision))
        except Exception:
            failed.append(ordinal)
            symbols.append(DOC_ABSENT)
            continue
        symbols.append(count)
    revisions = tuple(revision for revision, _ in linked_pairs)
    return ElementTimeline(
        element_text,
        document,
        symbols,
        revisions,
        partial=bool(failed),
        failed_ordinals=failed,
    )


def classify_fix(timeline: ElementTimeline, episode: OutdatedEpisode) -> FixEvent:
    """What ended an episode, read off the symbol at its end ordinal."""
    if episode.end_ordinal is None:
        raise ValueError("an ongoing episode has no fix")
    symbol = timeline.symbols[episode.end_ordinal]
    if symbol == DOC_ABSENT:
        kind = FIX_DOC_DELETE
    elif symbol == NO_REFERENCE:
        kind = FIX_DOC_UPDATE
    elif is_positive(symbol):
        kind = FIX_SOURCE_CHANGE
    else:
        raise ValueError(f"episode cannot end on symbol {symbol!r}")
    revision = timeline.revisions[episode.end_ordinal]
    return FixEvent(kind, episode.end_ordinal, revision.sha, revision.timestamp)


def detect_episodes(timeline: ElementTimeline, strict: bool = False) -> list[OutdatedEpisode]:
    """Find every outdated episode in a timeline.

    By default a zero opens an episode whenever any positive count appears
    anywhere earlier, even across intervening NoReference symbols. With
    ``strict`` the last doc-present symbol before the zero run must itself be
    a positive count, which drops stretches where the reference had already
    been removed from the document and only later re-added.
    """
    symbols = timeline.symbols
    n = len(symbols)
    episodes: list[OutdatedEpisode] = []
    seen_positive = False
    last_present_positive = False
    i = 0
    while i < n:
        symbol = symbols[i]
        if is_positive(symbol):
            seen_positive = True
            last_present_positive = True
            i += 1
            continue
        if symbol == NO_REFERENCE:
            last_present_positive = False
            i += 1
            continue
        if symbol == DOC_ABSENT:
            i += 1
            continue
        # A zero. Decide whether it opens an episode.
        eligible = last_present_positive if strict else seen_positive
        if not eligible:
            last_present_positive = False
            i += 1
            continue
        start = i
        end: int | None = None
        j = i
        while j < n:
            current = symbols[j]
            if is_zero(current):
                j += 1
                continue
            if current == DOC_ABSENT:
                k = j
                while k < n and symbols[k] == DOC_ABSENT:
                    k += 1
                if k < n and is_zero(symbols[k]):
                    # Zeros resume after the gap: same episode.
                    j = k
                    continue
                end = j
                break
            end = j
            break
        episode = OutdatedEpisode(timeline.element_text, timeline.document, start, end)
        if end is not None:
            episode.fix = classify_fix(timeline, episode)
        episodes.append(episode)
        if end is None:
            break
        i = end
    return episodes


def episode_duration(
    episode: OutdatedEpisode,
    revisions: tuple[Revision, ...],
    scan_time: int | None = None,
) -> int:
    """Seconds from the first outdated revision to the fix (or to *scan_time*).

    Commit timestamps are not monotone, so a fixed episode's duration can come
    out negative; callers keep the signed value and flag it rather than
    clamping.
    """
    start_ts = revisions[episode.start_ordinal].timestamp
    if episode.end_ordinal is None:
        if scan_time is None:
            raise ValueError("scan_time required for an ongoing episode")
        return scan_time - start_ts
    assert episode.fix is not None
    return episode.fix.at_timestamp - start_ts


def survival_curve(
    episodes: list[OutdatedEpisode],
    grid: list[int] | tuple[int, ...],
) -> list[tuple[float, float]]:
    """Fraction of episodes that outlived each horizon in *grid*.

    Expects fixed episodes with positive durations already assigned. A point
    (d, f) means a fraction f of the episodes took strictly longer than d
    seconds to fix. No episodes yields an empty curve.
    """
    durations = []
    for episode in episodes:
        if episode.duration_seconds is None:
            raise ValueError("episodes must carry duration_seconds")
        durations.append(episode.duration_seconds)
    if not durations:
        return []
    total = len(durations)
    return [
        (float(d), sum(1 for x in durations if x > d) / total)
        for d in grid
    ]
