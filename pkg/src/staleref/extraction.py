"""Regex-driven extraction of code-element references from documentation text.

A catalog of regular expressions decides what counts as a code element:
identifiers in camelCase or PascalCase, UPPER_SNAKE constants, qualified and
empty-parens calls, template types, file paths, and anything an author put in
inline backticks. Fenced code blocks, markdown link destinations, and bare
URLs are masked out before the rules run, so offsets always refer to the
original document text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .docdiscovery import DocumentDescriptor

ORIGIN_ORIGINAL = "original"
ORIGIN_ADDED = "added"
ORIGIN_MODIFIED = "modified"
RULE_ORIGINS = frozenset({ORIGIN_ORIGINAL, ORIGIN_ADDED, ORIGIN_MODIFIED})

MIN_ELEMENT_LENGTH = 2

# One rule per line: id<TAB>capture-group<TAB>pattern. Lines starting with
# "#" and blank lines are ignored. The pattern is everything after the second
# tab, so patterns may themselves contain tabs.
DEFAULT_CATALOG_TEXT = """\
# Built-in code-element extraction rules.
# Format: id<TAB>capture-group<TAB>pattern
backtick\t1\t`([^`\\r\\n]+)`
template-class\t0\t[A-Z][a-zA-Z]+ ?<[A-Z][a-zA-Z]*>
qualified-call\t0\t\\b[A-Za-z_][A-Za-z0-9_]*(?:\\.[A-Za-z_][A-Za-z0-9_]*)+\\([^()\\r\\n]*\\)
function-call\t0\t\\b[A-Za-z_][A-Za-z0-9_]*\\(\\)
camel-case\t0\t\\b[a-z][a-z0-9]*(?:[A-Z][a-zA-Z0-9]*)+\\b
pascal-case\t0\t\\b[A-Z][a-z0-9]+(?:[A-Z][a-zA-Z0-9]*)+\\b
upper-snake\t0\t\\b[A-Z][A-Z0-9]*(?:_[A-Z0-9]+)+\\b
dotted-name\t0\t\\b[A-Za-z_][A-Za-z0-9_-]*\\.[A-Za-z_][A-Za-z0-9_]*(?:\\.[A-Za-z0-9_]+)*\\b(?!\\()
path-like\t0\t\\.{0,2}/?[A-Za-z0-9_.-]+(?:/[A-Za-z0-9_.-]+)*/[A-Za-z0-9_.-]*[A-Za-z0-9_]
"""

# The built-in catalog deliberately has no rule for bare URLs; URLs are only
# picked up when an author backticks them.
_DEFAULT_RULE_ORIGINS = {
    "backtick": ORIGIN_ADDED,
    "template-class": ORIGIN_ORIGINAL,
    "qualified-call": ORIGIN_MODIFIED,
    "function-call": ORIGIN_MODIFIED,
    "camel-case": ORIGIN_MODIFIED,
    "pascal-case": ORIGIN_MODIFIED,
    "upper-snake": ORIGIN_ORIGINAL,
    "dotted-name": ORIGIN_ORIGINAL,
    "path-like": ORIGIN_MODIFIED,
}

DEFAULT_CATALOG_VERSION = "builtin-1"


class CatalogError(ValueError):
    """Raised when a rule catalog cannot be parsed or compiled."""


@dataclass
class RegexRule:
    id: str
    capture_group: int
    pattern: str
    origin: str = ORIGIN_ORIGINAL
    compiled: re.Pattern = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.origin not in RULE_ORIGINS:
            raise ValueError(f"unknown rule origin: {self.origin!r}")
        self.compiled = re.compile(self.pattern)
        if not 0 <= self.capture_group <= self.compiled.groups:
            raise ValueError(
                f"rule {self.id!r}: capture group {self.capture_group} "
                f"not present in pattern"
            )


@dataclass
class RegexCatalog:
    rules: list[RegexRule]
    version: str


@dataclass(frozen=True)
class CodeElementRef:
    """A code element mentioned in a document, with its source span.

    ``span`` is a half-open [start, end) offset pair into the decoded document
    text, so ``doc_text[start:end] == text`` always holds.
    """

    text: str
    rule_id: str
    document: DocumentDescriptor | None
    span: tuple[int, int]

    def __post_init__(self) -> None:
        if not self.text or self.text != self.text.strip():
            raise ValueError(f"element text must be non-empty and trimmed: {self.text!r}")
        start, end = self.span
        if not (0 <= start < end) or end - start != len(self.text):
            raise ValueError(f"span {self.span} does not fit text of length {len(self.text)}")


def load_catalog(text: str, version: str = "custom") -> RegexCatalog:
    """Parse a rule catalog from its tab-separated text form.

    Malformed lines, invalid regexes, bad capture-group indices, and duplicate
    rule ids all raise CatalogError naming the offending line.
    """
    rules: list[RegexRule] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t", 2)
        if len(parts) != 3:
            raise CatalogError(
                f"line {lineno}: expected id<TAB>capture-group<TAB>pattern, got {line!r}"
            )
        rule_id, group_text, pattern = parts[0].strip(), parts[1].strip(), parts[2]
        if not rule_id:
            raise CatalogError(f"line {lineno}: empty rule id")
        if rule_id in seen:
            raise CatalogError(f"line {lineno}: duplicate rule id {rule_id!r}")
        try:
            group = int(group_text)
        except ValueError:
            raise CatalogError(
                f"rule {rule_id!r} (line {lineno}): capture group must be an "
                f"integer, got {group_text!r}"
            ) from None
        try:
            rule = RegexRule(rule_id, group, pattern)
        except re.error as exc:
            raise CatalogError(
                f"rule {rule_id!r} (line {lineno}): invalid pattern: {exc}"
            ) from None
        except ValueError as exc:
            raise CatalogError(f"line {lineno}: {exc}") from None
        seen.add(rule_id)
        rules.append(rule)
    if not rules:
        raise CatalogError("catalog contains no rules")
    return RegexCatalog(rules, version)


def default_catalog() -> RegexCatalog:
    catalog = load_catalog(DEFAULT_CATALOG_TEXT, version=DEFAULT_CATALOG_VERSION)
    for rule in catalog.rules:
        rule.origin = _DEFAULT_RULE_ORIGINS[rule.id]
    return catalog


_FENCE_LINE_RE = re.compile(r"^[ \t]*```")
_NON_NEWLINE_RE = re.compile(r"[^\r\n]")
_LINK_DEST_RE = re.compile(r"\]\(([^)\r\n]*)\)")
_BACKTICK_INTERIOR_RE = re.compile(r"`([^`\r\n]+)`")
_BARE_URL_RE = re.compile(r"[A-Za-z][A-Za-z0-9+.-]*://[^\s<>`]+")


def mask_fenced_blocks(text: str) -> str:
    """Replace the interior of triple-backtick fences with spaces.

    Only line-anchored fences count; the fence marker lines themselves are
    kept. Newlines are preserved so that every offset outside a fence is
    unchanged, and an unterminated fence masks to the end of the text.
    """
    out: list[str] = []
    in_fence = False
    for line in text.splitlines(keepends=True):
        if _FENCE_LINE_RE.match(line):
            in_fence = not in_fence
            out.append(line)
        elif in_fence:
            out.append(_NON_NEWLINE_RE.sub(" ", line))
        else:
            out.append(line)
    return "".join(out)


def _mask_ranges(text: str, ranges: list[tuple[int, int]]) -> str:
    if not ranges:
        return text
    buf = list(text)
    for start, end in ranges:
        for i in range(start, end):
            if buf[i] not in ("\r", "\n"):
                buf[i] = " "
    return "".join(buf)


def _prepare_text(doc_text: str) -> str:
    masked = mask_fenced_blocks(doc_text)
    masked = _mask_ranges(masked, [m.span(1) for m in _LINK_DEST_RE.finditer(masked)])
    # Bare URLs are never elements, but URLs kept inside inline backticks
    # still are, so only URLs outside backtick spans get masked.
    backtick_spans = [m.span(1) for m in _BACKTICK_INTERIOR_RE.finditer(masked)]
    url_ranges = []
    for m in _BARE_URL_RE.finditer(masked):
        start, end = m.span()
        inside = any(bs <= start and end <= be for bs, be in backtick_spans)
        if not inside:
            url_ranges.append((start, end))
    return _mask_ranges(masked, url_ranges)


def _drop_contained(
    matches: list[tuple[int, int, int, str, str]],
) -> list[tuple[int, int, int, str, str]]:
    """Drop matches whose span lies strictly inside another match's span.

    Equal spans (the same text hit by two rules) are kept; the later text
    dedupe picks the lower-index rule. Sorting by (start, -end) means every
    potential container precedes its containees, so one running maximum-extent
    span is enough to detect strict containment.
    """
    ordered = sorted(matches, key=lambda item: (item[0], -item[1]))
    kept: list[tuple[int, int, int, str, str]] = []
    cover_start, cover_end = -1, -1
    for item in ordered:
        start, end = item[0], item[1]
        if end < cover_end or (end == cover_end and start > cover_start):
            continue
        kept.append(item)
        if end > cover_end:
            cover_start, cover_end = start, end
    return kept


def extract_elements(
    doc_text: str,
    catalog: RegexCatalog,
    document: DocumentDescriptor | None = None,
) -> list[CodeElementRef]:
    """Run every catalog rule over *doc_text* and collect element references.

    Results are ordered by first occurrence and deduplicated by element text,
    keeping the earliest span. A match strictly inside another match's span is
    dropped (`renderFiles` inside `renderFiles('./files')` is not a separate
    element). Matches shorter than MIN_ELEMENT_LENGTH after trimming are also
    dropped, as is anything that only matched because of masking (the emitted
    text must equal the original document substring at its span).
    """
    masked = _prepare_text(doc_text)
    matches: list[tuple[int, int, int, str, str]] = []
    for rule_index, rule in enumerate(catalog.rules):
        for m in rule.compiled.finditer(masked):
            raw = m.group(rule.capture_group)
            if raw is None:
                continue
            text = raw.strip()
            if len(text) < MIN_ELEMENT_LENGTH:
                continue
            start = m.start(rule.capture_group) + (len(raw) - len(raw.lstrip()))
            end = start + len(text)
            if doc_text[start:end] != text:
                continue
            matches.append((start, end, rule_index, text, rule.id))

    matches = _drop_contained(matches)
    matches.sort(key=lambda item: (item[0], item[1], item[2]))
    refs: list[CodeElementRef] = []
    seen: set[str] = set()
    for start, end, _, text, rule_id in matches:
        if text in seen:
            continue
        seen.add(text)
        refs.append(CodeElementRef(text, rule_id, document, (start, end)))
    return refs
