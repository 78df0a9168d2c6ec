"""Domain rules: ORCID checks, access decisions, credit, validation."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowhub.errors import IntegrityError
from flowhub.model import (
    Creator,
    Grant,
    Right,
    SubjectKind,
    ToolRef,
    Visibility,
    check_access,
    is_valid_orcid,
    resolve_credit,
    validate_entry,
)

from .conftest import FUTURE, NOW, PAST, make_entry, make_version, owning_team_grant


# ---------------------------------------------------------------------------
# ORCID
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "orcid",
    [
        "0000-0002-1825-0097",  # canonical checksum example
        "0000-0001-5109-3700",
        "0000-0002-1694-233X",
        "0000-0003-1219-2137",
    ],
)
def test_valid_orcids(orcid):
    assert is_valid_orcid(orcid)


@pytest.mark.parametrize(
    "orcid",
    [
        "0000-0002-1825-0098",  # checksum off by one
        "0000-0002-1825-009",  # too short
        "0000-0002-1825-00972",  # too long
        "0000_0002_1825_0097",  # wrong separators
        "orcid.org/0000-0002-1825-0097",
    ],
)
def test_invalid_orcids(orcid):
    assert not is_valid_orcid(orcid)


# ---------------------------------------------------------------------------
# Access control: exhaustive truth table
# ---------------------------------------------------------------------------

VISIBILITIES = [Visibility.PUBLIC, Visibility.REGISTERED, Visibility.EMBARGOED, Visibility.PRIVATE]
RIGHTS = [Right.VIEW, Right.DOWNLOAD, Right.EDIT, Right.MANAGE]

# Actor relations: anonymous, registered with no relation to the entry,
# directly granted download, member of the owning team (team holds manage),
# space admin over the owning team's space.
RELATIONS = ["anonymous", "unrelated", "user_grant", "team_member", "space_admin"]


def relation_actor(relation, hierarchy):
    if relation == "anonymous":
        return None
    return {
        "unrelated": hierarchy["users"]["u_other"],
        "user_grant": hierarchy["users"]["u_granted"],
        "team_member": hierarchy["users"]["u_member"],
        "space_admin": hierarchy["users"]["u_spaceadmin"],
    }[relation]


def oracle_decision(visibility, relation, right):
    """Independent statement of the access rules, written as a plain table.

    Grants in play: the owning team holds manage, the user_grant relation
    holds a direct download grant, the space admin has implicit manage.
    The embargoed entry's date is in the future.
    """
    granted_rank = {
        "anonymous": -1,
        "unrelated": -1,
        "user_grant": Right.DOWNLOAD.rank,
        "team_member": Right.MANAGE.rank,
        "space_admin": Right.MANAGE.rank,
    }[relation]
    if right in (Right.EDIT, Right.MANAGE):
        return relation != "anonymous" and granted_rank >= right.rank
    if granted_rank >= right.rank:
        return True
    if visibility == Visibility.PUBLIC:
        return True
    if visibility == Visibility.REGISTERED:
        return relation != "anonymous"
    return False  # embargoed before date without grant, or private


def test_access_truth_table(hierarchy):
    grants = [owning_team_grant(Right.MANAGE), Grant(SubjectKind.USER, "u_granted", Right.DOWNLOAD)]
    for visibility, relation, right in itertools.product(VISIBILITIES, RELATIONS, RIGHTS):
        entry = make_entry(
            visibility=visibility,
            grants=grants,
            embargo_until=FUTURE if visibility == Visibility.EMBARGOED else None,
        )
        actor = relation_actor(relation, hierarchy)
        decision = check_access(
            actor, entry, right, teams=hierarchy["teams"], spaces=hierarchy["spaces"], now=NOW
        )
        expected = oracle_decision(visibility, relation, right)
        assert decision.allow == expected, (
            f"{visibility.value} x {relation} x {right.value}: got {decision}, want {expected}"
        )


def test_anonymous_views_public_entry(hierarchy):
    entry = make_entry(visibility=Visibility.PUBLIC)
    assert check_access(None, entry, Right.VIEW, teams=hierarchy["teams"], spaces=hierarchy["spaces"])


def test_anonymous_denied_private_entry(hierarchy):
    entry = make_entry(visibility=Visibility.PRIVATE)
    decision = check_access(None, entry, Right.VIEW, teams=hierarchy["teams"], spaces=hierarchy["spaces"])
    assert not decision.allow


def test_team_member_downloads_embargoed_entry_before_date(hierarchy):
    entry = make_entry(
        visibility=Visibility.EMBARGOED,
        embargo_until=FUTURE,
        grants=[owning_team_grant(Right.MANAGE)],
    )
    decision = check_access(
        hierarchy["users"]["u_member"], entry, Right.DOWNLOAD,
        teams=hierarchy["teams"], spaces=hierarchy["spaces"], now=NOW,
    )
    assert decision.allow and decision.reason == "granted"


def test_embargo_elapsed_allows_anonymous_download(hierarchy):
    entry = make_entry(visibility=Visibility.EMBARGOED, embargo_until=PAST)
    decision = check_access(
        None, entry, Right.DOWNLOAD, teams=hierarchy["teams"], spaces=hierarchy["spaces"], now=NOW
    )
    assert decision.allow


def test_space_admin_implicit_manage(hierarchy):
    entry = make_entry(visibility=Visibility.PRIVATE)  # no grants at all
    decision = check_access(
        hierarchy["users"]["u_spaceadmin"], entry, Right.MANAGE,
        teams=hierarchy["teams"], spaces=hierarchy["spaces"], now=NOW,
    )
    assert decision.allow


@settings(max_examples=200, deadline=None)
@given(
    visibility=st.sampled_from(VISIBILITIES),
    relation=st.sampled_from(RELATIONS),
    grant_right=st.sampled_from(RIGHTS),
    embargo_past=st.booleans(),
)
def test_access_monotonicity(visibility, relation, grant_right, embargo_past):
    """allow(right) implies allow(weaker right) for any fixed actor/entry."""
    from flowhub.model import Membership, Role, Space, Team, TeamMember, User

    teams = {"t1": Team("t1", "T1", space_id="s1", members=[TeamMember("u_member", Role.MEMBER)])}
    spaces = {
        "s0": Space("s0", "Independent Teams", is_default=True),
        "s1": Space("s1", "S1", admin_user_ids={"u_spaceadmin"}),
    }
    entry = make_entry(
        visibility=visibility,
        grants=[Grant(SubjectKind.TEAM, "t1", grant_right),
                Grant(SubjectKind.USER, "u_granted", grant_right)],
        embargo_until=PAST if embargo_past else FUTURE,
    )
    actor = {
        "anonymous": None,
        "unrelated": User("ux", "X"),
        "user_grant": User("u_granted", "G"),
        "team_member": User("u_member", "M", memberships=[Membership("t1")]),
        "space_admin": User("u_spaceadmin", "SA"),
    }[relation]
    allowed = [
        check_access(actor, entry, r, teams=teams, spaces=spaces, now=NOW).allow for r in RIGHTS
    ]
    for weaker, stronger in zip(allowed, allowed[1:]):
        assert not stronger or weaker, f"monotonicity violated: {allowed}"


def test_widening_visibility_never_revokes(hierarchy):
    """Anything allowed under private stays allowed under public."""
    grants = [owning_team_grant(Right.MANAGE), Grant(SubjectKind.USER, "u_granted", Right.DOWNLOAD)]
    for relation in RELATIONS:
        actor = relation_actor(relation, hierarchy)
        for right in RIGHTS:
            private_entry = make_entry(visibility=Visibility.PRIVATE, grants=grants)
            public_entry = make_entry(visibility=Visibility.PUBLIC, grants=grants)
            under_private = check_access(
                actor, private_entry, right, teams=hierarchy["teams"], spaces=hierarchy["spaces"], now=NOW
            ).allow
            under_public = check_access(
                actor, public_entry, right, teams=hierarchy["teams"], spaces=hierarchy["spaces"], now=NOW
            ).allow
            assert not under_private or under_public


# ---------------------------------------------------------------------------
# Credit resolution
# ---------------------------------------------------------------------------


def test_minimal_entry_credit(hierarchy):
    entry = make_entry(
        teams=("t2",),
        creators=[Creator("Solo Author")],
        submitter="u_other",
    )
    graph = resolve_credit(
        entry, teams=hierarchy["teams"], spaces=hierarchy["spaces"], users=hierarchy["users"]
    )
    assert graph.team_ids == ["t2"]
    assert graph.space_ids == ["s0"]  # the default space
    assert len(graph.creators) == 1
    assert graph.derived_from == []
    assert ("user:u_other", "submitted", "entry:w000001") in graph.edges


def test_two_teams_two_spaces(hierarchy):
    entry = make_entry(teams=("t1", "t2"))
    graph = resolve_credit(
        entry, teams=hierarchy["teams"], spaces=hierarchy["spaces"], users=hierarchy["users"]
    )
    # brute-force union over the membership tables
    expected_spaces = sorted({hierarchy["teams"][t].space_id for t in ("t1", "t2")})
    assert graph.space_ids == expected_spaces
    expected_orgs = set()
    for t in ("t1", "t2"):
        for member in hierarchy["teams"][t].members:
            user = hierarchy["users"][member.user_id]
            m = user.membership_for(t)
            if m:
                expected_orgs |= m.organisation_ids
    assert graph.organisation_ids == sorted(expected_orgs)


def test_attribution_produces_derives_edge(hierarchy):
    entry = make_entry(attributions=["w000099"])
    graph = resolve_credit(
        entry, teams=hierarchy["teams"], spaces=hierarchy["spaces"], users=hierarchy["users"]
    )
    assert ("entry:w000001", "derives", "entry:w000099") in graph.edges
    assert graph.derived_from == ["w000099"]


def test_credit_is_deterministic(hierarchy):
    entry = make_entry(teams=("t1", "t2"), attributions=["w9", "w3"])
    args = dict(teams=hierarchy["teams"], spaces=hierarchy["spaces"], users=hierarchy["users"])
    assert resolve_credit(entry, **args) == resolve_credit(entry, **args)


def test_dangling_team_is_integrity_error(hierarchy):
    entry = make_entry(teams=("t_missing",))
    with pytest.raises(IntegrityError):
        resolve_credit(entry, teams=hierarchy["teams"], spaces=hierarchy["spaces"], users=hierarchy["users"])


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def test_minimal_entry_validates_with_warnings():
    entry = make_entry(title="x", license=None, creators=[])
    report = validate_entry(entry)
    assert report.errors == []
    assert {"missing_license", "missing_creators"} <= report.warning_codes()


def test_empty_title_is_error():
    report = validate_entry(make_entry(title=""))
    assert "missing_title" in report.error_codes()


def test_no_teams_is_error():
    report = validate_entry(make_entry(teams=()))
    assert "missing_teams" in report.error_codes()


def test_edam_topic_and_no_creators_warn_only():
    entry = make_entry(edam_topics=["topic_0196"], creators=[])
    report = validate_entry(entry)
    assert report.errors == []
    # hand-written checklist: which warnings must fire for this entry
    expected = {"missing_creators", "missing_license", "missing_description", "missing_tool_refs"}
    assert expected <= report.warning_codes()
    assert "unknown_edam_id" not in report.warning_codes()
    assert "missing_edam_annotations" not in report.warning_codes()


def test_unknown_edam_id_warns():
    report = validate_entry(make_entry(edam_topics=["topic_9999"]))
    assert "unknown_edam_id" in report.warning_codes()


def test_self_attribution_is_error():
    report = validate_entry(make_entry(entry_id="w1", attributions=["w1"]))
    assert "self_attribution" in report.error_codes()


def test_bad_version_sequence_is_error():
    entry = make_entry(versions=[make_version(1), make_version(3)])
    report = validate_entry(entry)
    assert "invalid_version_sequence" in report.error_codes()


def test_invalid_creator_orcid_is_error():
    entry = make_entry(creators=[Creator("A", orcid="0000-0002-1825-0098")])
    assert "invalid_orcid" in validate_entry(entry).error_codes()


def test_unknown_license_warns():
    report = validate_entry(make_entry(license="MyCustomLicense"))
    assert "unknown_license" in report.warning_codes()


def test_known_license_no_license_warning():
    report = validate_entry(make_entry(license="MIT"))
    assert "missing_license" not in report.warning_codes()
    assert "unknown_license" not in report.warning_codes()


def test_malformed_biotools_id_is_error():
    entry = make_entry(tool_refs=[ToolRef("x", biotools_id="bad id!")])
    assert "invalid_biotools_id" in validate_entry(entry).error_codes()
