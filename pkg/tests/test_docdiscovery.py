"""Tests for documentation discovery."""

from __future__ import annotations

import pytest

from staleref.docdiscovery import (
    ALL_FORMATS,
    DiscoveryConfig,
    DocumentDescriptor,
    ORIGIN_README,
    ORIGIN_WIKI,
    discover_documents,
    is_recognized_format,
)


def paths(docs):
    return [(d.origin, d.path) for d in docs]


class TestFormatTable:
    def test_markdown_extensions(self):
        for name in ("README.md", "a.markdown", "b.mdown", "c.mkdn"):
            assert is_recognized_format(name) == "markdown"

    def test_other_markup_extensions(self):
        assert is_recognized_format("doc.rst") == "restructuredtext"
        assert is_recognized_format("doc.adoc") == "asciidoc"
        assert is_recognized_format("doc.textile") == "textile"
        assert is_recognized_format("doc.org") == "org"
        assert is_recognized_format("doc.rdoc") == "rdoc"
        assert is_recognized_format("doc.mediawiki") == "mediawiki"
        assert is_recognized_format("doc.pod") == "pod"
        assert is_recognized_format("notes.txt") == "plaintext"

    def test_case_insensitive_extension(self):
        assert is_recognized_format("README.MD") == "markdown"
        assert is_recognized_format("guide.ASCIIDOC") == "asciidoc"

    def test_unrecognized(self):
        assert is_recognized_format("main.py") is None
        assert is_recognized_format("archive.tar.gz") is None
        assert is_recognized_format("README") is None
        assert is_recognized_format(".gitignore") is None


class TestDiscovery:
    def test_root_readme_case_insensitive(self):
        docs = discover_documents(["readme.md", "src/x.py"], None, DiscoveryConfig())
        assert paths(docs) == [(ORIGIN_README, "readme.md")]

    def test_nested_readme_not_discovered(self):
        docs = discover_documents(["docs/README.md", "x.py"], None, DiscoveryConfig())
        assert docs == []

    def test_extensionless_readme_excluded(self):
        # Without an extension the markup format cannot be derived.
        docs = discover_documents(["README", "x.py"], None, DiscoveryConfig())
        assert docs == []

    def test_readme_format_variants(self):
        docs = discover_documents(["README.rst"], None, DiscoveryConfig())
        assert docs[0].format == "restructuredtext"

    def test_wiki_collects_all_recognized(self):
        docs = discover_documents(
            ["README.md"],
            ["Home.md", "deep/Page.rst", "img/logo.png", "Data.json"],
            DiscoveryConfig(),
        )
        assert paths(docs) == [
            (ORIGIN_README, "README.md"),
            (ORIGIN_WIKI, "Home.md"),
            (ORIGIN_WIKI, "deep/Page.rst"),
        ]

    def test_extra_doc_globs(self):
        config = DiscoveryConfig(extra_doc_globs=("docs/*.md",))
        docs = discover_documents(["docs/guide.md", "docs/img.png", "x.py"], None, config)
        assert paths(docs) == [(ORIGIN_README, "docs/guide.md")]

    def test_extra_glob_does_not_duplicate_readme(self):
        config = DiscoveryConfig(extra_doc_globs=("*.md",))
        docs = discover_documents(["README.md"], None, config)
        assert paths(docs) == [(ORIGIN_README, "README.md")]

    def test_deterministic_order(self):
        docs = discover_documents(
            ["README.md"], ["Zeta.md", "Alpha.md"], DiscoveryConfig()
        )
        assert paths(docs) == [
            (ORIGIN_README, "README.md"),
            (ORIGIN_WIKI, "Alpha.md"),
            (ORIGIN_WIKI, "Zeta.md"),
        ]

    def test_no_wiki_tree(self):
        docs = discover_documents(["README.md"], None, DiscoveryConfig())
        assert paths(docs) == [(ORIGIN_README, "README.md")]


class TestTypes:
    def test_descriptor_validation(self):
        with pytest.raises(ValueError):
            DocumentDescriptor("nowhere", "README.md", "markdown")
        with pytest.raises(ValueError):
            DocumentDescriptor(ORIGIN_README, "/abs/path.md", "markdown")
        with pytest.raises(ValueError):
            DocumentDescriptor(ORIGIN_README, "README.md", "docx")

    def test_page_name(self):
        doc = DocumentDescriptor(ORIGIN_WIKI, "guides/Getting-Started.md", "markdown")
        assert doc.page_name == "Getting-Started"

    def test_config_rejects_unknown_format(self):
        with pytest.raises(ValueError):
            DiscoveryConfig(format_allowlist=frozenset({"markdown", "docx"}))

    def test_all_formats_non_empty(self):
        assert "markdown" in ALL_FORMATS
