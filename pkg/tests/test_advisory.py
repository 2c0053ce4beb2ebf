from __future__ import annotations

from functools import cmp_to_key

import pytest
from hypothesis import given
from hypothesis import strategies as st

from iacsmell.advisory import (
    AdvisoryDB,
    AdvisoryError,
    AdvisoryRecord,
    VersionError,
    compare_versions,
    default_advisories,
    parse_advisories,
    version_key,
)


@pytest.mark.parametrize("a,b,sign", [
    ("1.0.1", "1.0.2", -1),
    ("1.0.10", "1.0.9", 1),
    ("1.0", "1.0.0", 0),
    ("v2.4.51", "2.4.51", 0),
    ("1:2.4.50", "2.4.51", -1),
    ("1.0.1g", "1.0.2", -1),
    ("2.15.0", "2.15.0-rc1", 1),
])
def test_compare(a, b, sign):
    assert compare_versions(a, b) == sign


def test_unparseable_version():
    with pytest.raises(VersionError):
        version_key("latest")


def test_openssl_heartbleed_record():
    db = default_advisories()
    hits = db.query("apt", "openssl", "1.0.1")
    assert [(r.advisory_id, r.cwe, r.safe_below) for r in hits] == [("CVE-2014-0160", "CWE-125", "1.0.2")]
    assert db.query("apt", "openssl", "3.9.9") == []
    assert db.query("apt", "openssl", None) == []
    assert db.query("apt", "no-such-package", "1.0") == []


def test_eol_record_matches_any_version():
    db = default_advisories()
    hits = db.query("apt", "python2.7", None)
    assert hits and all(r.eol for r in hits)
    assert not any(r.is_vulnerability for r in hits)


def test_merge_keeps_widest_range():
    db = AdvisoryDB([
        AdvisoryRecord("pip", "Lib", "1.2", advisory_id="CVE-1"),
        AdvisoryRecord("pip", "lib", "1.5", advisory_id="CVE-1"),
    ])
    assert len(db) == 1
    assert db.query("pip", "LIB", "1.4")[0].safe_below == "1.5"


def test_parse_errors_carry_line():
    with pytest.raises(AdvisoryError) as exc:
        parse_advisories("# c\npip|x|1.0|false|false\n")
    assert exc.value.line == 2
    with pytest.raises(AdvisoryError, match="ecosystem"):
        parse_advisories("cargo|x|1.0|false|false|CVE-1|CWE-1\n")
    with pytest.raises(AdvisoryError, match="needs"):
        parse_advisories("pip|x||false|false||\n")


def test_row_round_trip():
    db = default_advisories()
    again = parse_advisories("\n".join(r.to_row() for r in db.records()))
    assert again.records() == db.records()


_versions = st.lists(
    st.one_of(st.integers(0, 30).map(str), st.from_regex(r"[0-9]{1,2}[a-z]{1,2}", fullmatch=True)),
    min_size=1, max_size=4,
).map(".".join)


@given(_versions, _versions, _versions)
def test_comparator_is_total_order(a, b, c):
    assert compare_versions(a, a) == 0
    assert compare_versions(a, b) == -compare_versions(b, a)
    if compare_versions(a, b) <= 0 and compare_versions(b, c) <= 0:
        assert compare_versions(a, c) <= 0
    ordered = sorted([a, b, c], key=cmp_to_key(compare_versions))
    assert all(compare_versions(x, y) <= 0 for x, y in zip(ordered, ordered[1:]))
