from __future__ import annotations

import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iacsmell.taxonomy import (
    TOP10_IDS,
    SmellCategory,
    Taxonomy,
    TaxonomyCountWarning,
    TaxonomyError,
    category_for_cwe,
    default_taxonomy,
    parse_taxonomy,
    resolve_id,
    serialize_taxonomy,
)

TOP10_CWES = {
    "insecure-configuration-management": ("CWE-306",),
    "insecure-dependency-management": ("CWE-1104",),
    "insecure-input-handling": ("CWE-20",),
    "outdated-dependencies": ("CWE-1104",),
    "path-traversal": ("CWE-22",),
    "command-injection": ("CWE-77",),
    "code-injection": ("CWE-94",),
    "outdated-software-version": ("CWE-1104",),
    "inadequate-naming-convention": ("CWE-710",),
    "sensitive-information-exposure": ("CWE-256",),
}


def test_default_counts():
    tax = default_taxonomy()
    assert len(tax) == 62
    assert [c.id for c in tax.rule_bound] == list(TOP10_IDS)


def test_top10_cwe_mappings():
    tax = default_taxonomy()
    for cid, cwes in TOP10_CWES.items():
        assert tax.get(cid).cwes == cwes


def test_insecure_logging_is_not_rule_bound():
    cat = default_taxonomy().get("insecure-logging")
    assert cat.cwes == ("CWE-532", "CWE-217")
    assert not cat.rule_bound


def test_cwe_reverse_lookup():
    ids = [c.id for c in category_for_cwe("CWE-1104")]
    assert ids == ["insecure-dependency-management", "outdated-dependencies", "outdated-software-version"]
    assert category_for_cwe("CWE-9999") == []


def test_aliases_resolve():
    assert resolve_id("Outdated Software Dependencies") == "outdated-dependencies"
    assert resolve_id("Inadequate Naming Conventions") == "inadequate-naming-convention"
    assert resolve_id("Path Traversal") == "path-traversal"
    assert default_taxonomy().get("Command Injection").cwes == ("CWE-77",)


def test_bad_cwe_reports_line():
    with pytest.raises(TaxonomyError, match="line 2"):
        parse_taxonomy("# header\nx|X|CWE-abc|false|d\n")


def test_duplicate_id_rejected():
    with pytest.raises(TaxonomyError, match="duplicate"):
        parse_taxonomy("a|A||false|d\na|A||false|d\n")


def test_count_mismatch_warns_or_raises():
    with pytest.warns(TaxonomyCountWarning):
        tax = parse_taxonomy("a|A|CWE-1|true|d\n")
    assert len(tax) == 1
    with pytest.raises(TaxonomyError, match="expected 62"):
        parse_taxonomy("a|A|CWE-1|true|d\n", strict=True)


_ids = st.from_regex(r"[a-z][a-z0-9]{0,6}(-[a-z0-9]{1,5}){0,2}", fullmatch=True)
_text = st.text(st.characters(blacklist_characters="|\n\r", blacklist_categories=("Cs", "Zl", "Zp", "Cc")),
                max_size=20).map(str.strip)
_cwes = st.lists(st.integers(1, 2000).map(lambda n: f"CWE-{n}"), max_size=3, unique=True).map(tuple)


@st.composite
def taxonomies(draw):
    ids = draw(st.lists(_ids, min_size=1, max_size=8, unique=True))
    cats = [SmellCategory(i, draw(_text), draw(_cwes), draw(st.booleans()), draw(_text), draw(st.booleans()))
            for i in ids]
    return Taxonomy(tuple(cats))


@given(taxonomies())
def test_serialize_round_trip(tax):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TaxonomyCountWarning)
        again = parse_taxonomy(serialize_taxonomy(tax))
    assert again == tax


def test_default_round_trip():
    tax = default_taxonomy()
    assert parse_taxonomy(serialize_taxonomy(tax), strict=True) == tax
