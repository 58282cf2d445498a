"""Tests for the regex rule catalog and element extraction."""

from __future__ import annotations

import random

import pytest

from staleref.extraction import (
    CatalogError,
    DEFAULT_CATALOG_TEXT,
    default_catalog,
    extract_elements,
    load_catalog,
    mask_fenced_blocks,
)


@pytest.fixture(scope="module")
def catalog():
    return default_catalog()


def texts(refs):
    return [r.text for r in refs]


class TestCatalogParsing:
    def test_default_catalog_loads(self, catalog):
        ids = [r.id for r in catalog.rules]
        assert len(ids) == len(set(ids))
        assert "backtick" in ids and "template-class" in ids
        assert catalog.version == "builtin-1"

    def test_comments_and_blanks_ignored(self):
        cat = load_catalog("# note\n\nword\t0\t\\bfoo\\b\n")
        assert [r.id for r in cat.rules] == ["word"]

    def test_malformed_line(self):
        with pytest.raises(CatalogError, match="line 1"):
            load_catalog("only-two-fields\t0\n")

    def test_invalid_pattern_names_rule(self):
        with pytest.raises(CatalogError, match="rule 'bad'"):
            load_catalog("bad\t0\t([\n")

    def test_bad_capture_group(self):
        with pytest.raises(CatalogError, match="capture group"):
            load_catalog("r\ttwo\tfoo\n")
        with pytest.raises(CatalogError, match="capture group"):
            load_catalog("r\t3\tfoo\n")

    def test_duplicate_id(self):
        with pytest.raises(CatalogError, match="duplicate"):
            load_catalog("r\t0\tfoo\nr\t0\tbar\n")

    def test_empty_catalog(self):
        with pytest.raises(CatalogError, match="no rules"):
            load_catalog("# nothing here\n")

    def test_pattern_may_contain_tabs(self):
        cat = load_catalog("tabby\t0\tfoo\tbar\n")
        assert cat.rules[0].pattern == "foo\tbar"


class TestMasking:
    def test_fence_interior_masked_same_length(self):
        text = "a\n```\nfoo()\n```\nb"
        masked = mask_fenced_blocks(text)
        assert masked == "a\n```\n     \n```\nb"
        assert len(masked) == len(text)

    def test_no_fences_identity(self):
        text = "plain text with `code`\n"
        assert mask_fenced_blocks(text) == text

    def test_unterminated_fence_masks_to_end(self):
        masked = mask_fenced_blocks("```\nxx")
        assert masked == "```\n  "

    def test_offsets_outside_fences_preserved(self):
        text = "start\n```\nhidden_fn()\n```\nafter `kept_fn()` end\n"
        masked = mask_fenced_blocks(text)
        assert len(masked) == len(text)
        pos = text.index("kept_fn")
        assert masked[pos : pos + 7] == "kept_fn"


class TestExtraction:
    def test_backtick_and_template_examples(self, catalog):
        refs = extract_elements("use `Worker<T>` and ArrayList<String>", catalog)
        assert texts(refs) == ["Worker<T>", "ArrayList<String>"]
        assert refs[0].rule_id == "backtick"
        assert refs[1].rule_id == "template-class"

    def test_template_with_space_and_nested_name(self, catalog):
        refs = extract_elements("returns Callback<SimpleResponse> or Future <Result>", catalog)
        assert "Callback<SimpleResponse>" in texts(refs)
        assert "Future <Result>" in texts(refs)

    def test_bare_url_line_yields_nothing(self, catalog):
        assert extract_elements("see https://example.com/page", catalog) == []

    def test_empty_document(self, catalog):
        assert extract_elements("", catalog) == []

    def test_dedup_keeps_first_span(self, catalog):
        refs = extract_elements(
            "call `renderFiles('./files')` then `renderFiles('./files')` again", catalog
        )
        assert len(refs) == 1
        assert refs[0].text == "renderFiles('./files')"
        assert refs[0].span[0] == len("call `")

    def test_contained_matches_suppressed(self, catalog):
        # renderFiles alone must not surface next to the full call, nor
        # ArrayList next to ArrayList<String>.
        refs = extract_elements("use ArrayList<String> here", catalog)
        assert texts(refs) == ["ArrayList<String>"]

    def test_fenced_block_fully_excluded(self, catalog):
        text = "before\n```\nsecret_fn()\nCamelThing\n```\nafter\n"
        assert extract_elements(text, catalog) == []

    def test_link_destination_masked(self, catalog):
        refs = extract_elements("read the [guide](path/to/file.py) first", catalog)
        assert texts(refs) == []

    def test_url_inside_backticks_kept(self, catalog):
        refs = extract_elements("fetch `https://x.io/a/b` quickly", catalog)
        assert texts(refs) == ["https://x.io/a/b"]

    def test_identifier_rules(self, catalog):
        refs = extract_elements(
            "camelThing and PascalThing and UPPER_CONST and pkg.mod.attr work", catalog
        )
        assert texts(refs) == ["camelThing", "PascalThing", "UPPER_CONST", "pkg.mod.attr"]

    def test_calls_and_paths(self, catalog):
        refs = extract_elements("run obj.method(arg) or plain_fn() on src/main.c now", catalog)
        assert texts(refs) == ["obj.method(arg)", "plain_fn()", "src/main.c"]

    def test_sentence_terminal_path_keeps_no_period(self, catalog):
        refs = extract_elements("Settings live in config/defaults.ini.", catalog)
        assert texts(refs) == ["config/defaults.ini"]

    def test_min_length_filter(self, catalog):
        assert extract_elements("single `x` char", catalog) == []

    def test_backticked_span_trimmed(self, catalog):
        refs = extract_elements("see ` spaced_fn() ` here", catalog)
        assert len(refs) == 1
        assert refs[0].text == "spaced_fn()"
        start, end = refs[0].span
        assert "see ` spaced_fn() ` here"[start:end] == "spaced_fn()"

    def test_span_fidelity_property(self, catalog):
        rng = random.Random(20240814)
        words = ["fooBar", "make_all()", "a/b/c.txt", "X", "`quoted_fn()`", "and", "THE_END"]
        for _ in range(50):
            doc = " ".join(rng.choice(words) for _ in range(rng.randrange(1, 30)))
            for ref in extract_elements(doc, catalog):
                start, end = ref.span
                assert doc[start:end] == ref.text

    def test_dump_is_byte_stable(self):
        assert DEFAULT_CATALOG_TEXT == DEFAULT_CATALOG_TEXT
        assert "template-class\t0\t[A-Z][a-zA-Z]+ ?<[A-Z][a-zA-Z]*>" in DEFAULT_CATALOG_TEXT
