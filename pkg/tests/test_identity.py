from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coopnet.identity import (
    BOT,
    UNAFFILIATED,
    AffiliationError,
    AffiliationMap,
    canonicalize_identities,
    load_affiliation_map,
    resolve_affiliation,
)
from coopnet.ingest import CommitRecord

TS = datetime(2021, 1, 1, tzinfo=timezone.utc)


def commit(sha_byte: str, email: str) -> CommitRecord:
    return CommitRecord(
        sha=sha_byte * 40,
        author_name="Dev",
        author_email=email,
        timestamp=TS,
        files=("a.py",),
    )


BASIC_CONFIG = """
# comment
[domains]
hp.example = HP
ibm.example = IBM

[emails]
dev1@gmail.example = HP

[aliases]
a@x.example, a@y.example

[bots]
ci-bot@project.example
"""


def test_load_affiliation_map():
    amap = load_affiliation_map(BASIC_CONFIG)
    assert amap.domain_rules == {"hp.example": "HP", "ibm.example": "IBM"}
    assert amap.email_overrides == {"dev1@gmail.example": "HP"}
    assert amap.alias_groups == (frozenset({"a@x.example", "a@y.example"}),)
    assert amap.bot_emails == frozenset({"ci-bot@project.example"})


def test_load_rejects_conflicting_override():
    config = "[emails]\ndev@a.example = HP\ndev@a.example = IBM\n"
    with pytest.raises(AffiliationError, match="HP.*IBM|IBM.*HP"):
        load_affiliation_map(config)


def test_load_allows_repeated_identical_override():
    config = "[emails]\ndev@a.example = HP\ndev@a.example = HP\n"
    amap = load_affiliation_map(config)
    assert amap.email_overrides == {"dev@a.example": "HP"}


def test_load_rejects_email_in_two_alias_groups():
    config = "[aliases]\na@x.example, a@y.example\na@y.example, a@z.example\n"
    with pytest.raises(AffiliationError, match="two alias groups"):
        load_affiliation_map(config)


def test_load_lowercases_keys():
    amap = load_affiliation_map("[domains]\nHP.example = HP\n[bots]\nCI@bot.example\n")
    assert "hp.example" in amap.domain_rules
    assert "ci@bot.example" in amap.bot_emails


def test_resolution_precedence():
    amap = load_affiliation_map(BASIC_CONFIG)
    assert resolve_affiliation("dev@hp.example", amap) == "HP"
    assert resolve_affiliation("dev@unknown.example", amap) == UNAFFILIATED
    assert resolve_affiliation("ci-bot@project.example", amap) == BOT
    # explicit override beats the (absent) gmail domain rule
    assert resolve_affiliation("dev1@gmail.example", amap) == "HP"


def test_override_beats_domain_rule():
    amap = load_affiliation_map(
        "[domains]\ngmail.example = Google\n[emails]\ndev1@gmail.example = HP\n"
    )
    assert resolve_affiliation("dev1@gmail.example", amap) == "HP"
    assert resolve_affiliation("other@gmail.example", amap) == "Google"


def test_canonicalize_folds_aliases():
    amap = load_affiliation_map(
        "[emails]\na@x.example = HP\n[aliases]\na@x.example, a@y.example\n"
    )
    identities, excluded = canonicalize_identities(
        [commit("1", "a@x.example"), commit("2", "a@y.example")], amap
    )
    assert not excluded
    assert identities["a@x.example"] is identities["a@y.example"]
    identity = identities["a@x.example"]
    assert identity.canonical_id == "a@x.example"
    assert identity.firm == "HP"
    assert identity.emails == frozenset({"a@x.example", "a@y.example"})


def test_canonicalize_excludes_missing_email_without_override():
    amap = load_affiliation_map("[domains]\nhp.example = HP\n")
    identities, excluded = canonicalize_identities([commit("1", "")], amap)
    assert identities == {}
    assert excluded == ["1" * 40]


def test_canonicalize_keeps_invalid_email_with_override():
    amap = load_affiliation_map("[emails]\ndev_at_hp = HP\n")
    identities, excluded = canonicalize_identities([commit("1", "dev_at_hp")], amap)
    assert not excluded
    assert identities["dev_at_hp"].firm == "HP"


def test_canonicalize_excludes_bots():
    amap = load_affiliation_map("[bots]\nci-bot@project.example\n")
    identities, excluded = canonicalize_identities(
        [commit("1", "ci-bot@project.example")], amap
    )
    assert identities == {}
    assert excluded == ["1" * 40]


def test_distinct_emails_stay_distinct():
    amap = load_affiliation_map("[domains]\nhp.example = HP\n")
    identities, _ = canonicalize_identities(
        [commit("1", "a@hp.example"), commit("2", "b@hp.example")], amap
    )
    assert identities["a@hp.example"].canonical_id != identities["b@hp.example"].canonical_id


def test_alias_group_with_conflicting_firms_errors():
    amap = load_affiliation_map(
        "[domains]\nhp.example = HP\nibm.example = IBM\n"
        "[aliases]\na@hp.example, a@ibm.example\n"
    )
    with pytest.raises(AffiliationError, match="multiple firms"):
        canonicalize_identities([commit("1", "a@hp.example")], amap)


def test_alias_group_conflict_resolved_by_override():
    amap = load_affiliation_map(
        "[domains]\nhp.example = HP\nibm.example = IBM\n"
        "[emails]\na@hp.example = HP\n"
        "[aliases]\na@hp.example, a@ibm.example\n"
    )
    identities, _ = canonicalize_identities([commit("1", "a@ibm.example")], amap)
    assert identities["a@ibm.example"].firm == "HP"


# --- properties -----------------------------------------------------------

emails = st.from_regex(r"[a-z]{1,4}@[a-z]{1,4}\.[a-z]{2,3}", fullmatch=True)
firms = st.sampled_from(["HP", "IBM", "RedHat", "Citrix"])


@st.composite
def affiliation_maps(draw):
    domain_rules = draw(st.dictionaries(st.from_regex(r"[a-z]{1,4}\.[a-z]{2,3}", fullmatch=True), firms, max_size=4))
    overrides = draw(st.dictionaries(emails, firms, max_size=4))
    bots = draw(st.sets(emails, max_size=2))
    return AffiliationMap(
        domain_rules=domain_rules,
        email_overrides=overrides,
        alias_groups=(),
        bot_emails=frozenset(bots),
    )


@given(emails, affiliation_maps())
def test_precedence_is_total(email, amap):
    """Exactly one rule class fires for any email."""
    result = resolve_affiliation(email, amap)
    if email in amap.bot_emails:
        assert result == BOT
    elif email in amap.email_overrides:
        assert result == amap.email_overrides[email]
    elif email.rpartition("@")[2] in amap.domain_rules:
        assert result == amap.domain_rules[email.rpartition("@")[2]]
    else:
        assert result == UNAFFILIATED


@given(st.lists(st.tuples(st.sampled_from("0123456789abcdef"), emails), max_size=8),
       affiliation_maps())
def test_canonicalize_is_idempotent(raw_commits, amap):
    records = [commit(sha_byte, email) for sha_byte, email in raw_commits]
    identities, excluded = canonicalize_identities(records, amap)
    survivors = [r for r in records if r.sha not in set(excluded)]
    rewritten = [
        CommitRecord(
            sha=r.sha,
            author_name=r.author_name,
            author_email=identities[r.author_email].canonical_id,
            timestamp=r.timestamp,
            files=r.files,
        )
        for r in survivors
    ]
    again, excluded_again = canonicalize_identities(rewritten, amap)
    assert not excluded_again
    for r in rewritten:
        assert again[r.author_email].canonical_id == r.author_email
        assert again[r.author_email].firm == identities[r.author_email].firm


@given(st.lists(st.tuples(st.sampled_from("0123456789abcdef"), emails),
                max_size=8, unique_by=lambda t: t[0]),
       affiliation_maps())
def test_folding_preserves_commit_attribution(raw_commits, amap):
    records = [commit(sha_byte, email) for sha_byte, email in raw_commits]
    identities, excluded = canonicalize_identities(records, amap)
    per_identity: dict[str, int] = {}
    for r in records:
        if r.sha in set(excluded):
            continue
        canonical = identities[r.author_email].canonical_id
        per_identity[canonical] = per_identity.get(canonical, 0) + 1
    assert sum(per_identity.values()) == len(records) - len(excluded)
