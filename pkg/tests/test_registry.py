"""Registry behaviour: pipelines, versioning, DOI state machine,
collections, subscriptions, entity management, concurrency."""

from __future__ import annotations

import random
import threading
from datetime import datetime, timezone
from pathlib import Path

import pytest

from flowhub.errors import (
    AccessDenied,
    AttributionCycle,
    AuthRequired,
    Conflict,
    DuplicateItem,
    FrozenVersion,
    InvalidInput,
    NotFoundError,
    ValidationFailed,
    VisibilityRequired,
)
from flowhub.model import ItemKind, Maturity
from flowhub.registry import (
    CrateSpec,
    GitSpec,
    Registry,
    RegistryConfig,
    SearchQuery,
    Store,
    UploadSpec,
)

FIXTURES = Path(__file__).parent / "fixtures"
GALAXY = (FIXTURES / "galaxy" / "find_transcripts.ga").read_bytes()


@pytest.fixture
def reg():
    return Registry()


@pytest.fixture
def seeded(reg):
    """One site admin, two ordinary users, a team in the default space."""
    admin, admin_key = reg.create_user("Root Admin", site_admin=True)
    alice, alice_key = reg.create_user("Alice", orcid="0000-0002-1825-0097")
    bob, _ = reg.create_user("Bob")
    team = reg.create_team(alice, "Assembly Team", reg.default_space().id)
    return {
        "registry": reg,
        "admin": admin,
        "alice": alice,
        "alice_key": alice_key,
        "bob": bob,
        "team": team,
    }


def upload_spec(main="wf.ga", content=GALAXY, extra=None):
    files = {main: content}
    files.update(extra or {})
    return UploadSpec(files=files, main_path=main)


def register(seeded, **overrides):
    base = {"title": "Find transcripts", "team_ids": [seeded["team"].id]}
    base.update(overrides)
    return seeded["registry"].register_workflow(seeded["alice"], upload_spec(), base)


# ---------------------------------------------------------------------------
# Registration
# ---------------------------------------------------------------------------


def test_upload_registration_parses_galaxy(seeded):
    entry = register(seeded)
    assert entry.workflow_class == "galaxy"
    assert entry.versions[0].version == 1
    structure = seeded["registry"].parse_structure(
        "galaxy", entry.versions[0].files, entry.versions[0].main_workflow_path
    )
    assert len(structure.steps) == 7
    assert [t.biotools_id for t in entry.tool_refs] == ["fastp", "star", "stringtie", "gffread"]


def test_registration_requires_membership(seeded):
    with pytest.raises(AccessDenied):
        seeded["registry"].register_workflow(
            seeded["bob"], upload_spec(), {"title": "X", "team_ids": [seeded["team"].id]}
        )


def test_registration_requires_auth(seeded):
    with pytest.raises(AuthRequired):
        seeded["registry"].register_workflow(None, upload_spec(), {"title": "X"})


def test_registration_validation_errors_abort(seeded):
    reg = seeded["registry"]
    before = reg.store.ids("entry")
    events_before = len(reg.store.events())
    with pytest.raises(ValidationFailed) as info:
        register(seeded, title="")
    assert "missing_title" in {f.code for f in info.value.report.errors}
    assert reg.store.ids("entry") == before  # no partial entry
    assert len(reg.store.events()) == events_before  # no events
    assert reg.search(seeded["alice"], SearchQuery()).total == len(before)  # no index residue


def test_crate_round_trip_registration(seeded):
    reg = seeded["registry"]
    original = register(
        seeded,
        description="A transcript workflow",
        license="MIT",
        tags=["rnaseq"],
        edam_topics=["topic_0196"],
    )
    archive = reg.export_crate(seeded["alice"], original.id)
    imported = reg.register_workflow(seeded["alice"], CrateSpec(archive))
    assert imported.title == original.title
    assert imported.description == original.description
    assert imported.license == original.license
    assert imported.tags == original.tags
    assert imported.edam_topics == original.edam_topics
    assert imported.workflow_class == original.workflow_class
    assert imported.creators == original.creators
    assert imported.tool_refs == original.tool_refs
    assert imported.team_ids == original.team_ids
    assert imported.policy.visibility == original.policy.visibility


def test_git_registration_prefills_citation(seeded, tmp_path):
    import subprocess

    repo = tmp_path / "wfrepo"
    repo.mkdir()
    subprocess.run(["git", "init", "-q", "-b", "main", str(repo)], check=True)
    (repo / "main.nf").write_text("#!/usr/bin/env nextflow\nworkflow { }\n")
    (repo / "README.md").write_text("# Pipeline\nImported readme.\n")
    (repo / "CITATION.cff").write_text(
        "cff-version: 1.2.0\n"
        "title: Cited pipeline\n"
        "authors:\n"
        "  - family-names: Silver\n"
        "    given-names: Ada\n"
        "    orcid: https://orcid.org/0000-0002-1825-0097\n"
        "  - family-names: Brown\n"
        "    given-names: Tom\n"
        "    orcid: https://orcid.org/0000-0001-5109-3700\n"
        "  - family-names: Third\n"
        "    given-names: Person\n"
    )
    env = {
        "GIT_AUTHOR_NAME": "F", "GIT_AUTHOR_EMAIL": "f@e.org",
        "GIT_COMMITTER_NAME": "F", "GIT_COMMITTER_EMAIL": "f@e.org",
    }
    subprocess.run(["git", "-C", str(repo), "add", "-A"], check=True, env=env)
    subprocess.run(["git", "-C", str(repo), "commit", "-q", "-m", "c1"], check=True, env=env)

    entry = seeded["registry"].register_workflow(
        seeded["alice"], GitSpec(str(repo)), {"team_ids": [seeded["team"].id]}
    )
    assert entry.title == "Cited pipeline"
    assert entry.description.startswith("# Pipeline")
    assert [c.orcid for c in entry.creators] == [
        "0000-0002-1825-0097", "0000-0001-5109-3700", None,
    ]
    assert entry.workflow_class == "nextflow"
    assert entry.versions[0].source.kind == "git"
    assert len(entry.versions[0].source.commit_id) == 40


def test_preview_does_not_persist(seeded):
    reg = seeded["registry"]
    preview = reg.preview_registration(upload_spec(), {"team_ids": [seeded["team"].id]})
    assert preview.detected_class == "galaxy"
    assert preview.prefill["title"] == "Find transcripts - TSI"  # from the .ga name field
    assert reg.store.ids("entry") == []


# ---------------------------------------------------------------------------
# Versioning
# ---------------------------------------------------------------------------


def test_add_version_sequential(seeded):
    reg = seeded["registry"]
    entry = register(seeded)
    v2 = reg.add_version(seeded["alice"], entry.id, upload_spec(content=b'{"a_galaxy_workflow": "true", "steps": {}}'))
    assert v2.version == 2
    stored = reg.get_entry(entry.id)
    assert [v.version for v in stored.versions] == [1, 2]
    assert stored.get_version(1).files.keys() == entry.versions[0].files.keys()


def test_add_version_requires_edit(seeded):
    entry = register(seeded)
    with pytest.raises(AccessDenied):
        seeded["registry"].add_version(seeded["bob"], entry.id, upload_spec())


def test_freeze_blocks_file_mutation(seeded):
    reg = seeded["registry"]
    entry = register(seeded)
    reg.freeze_version(seeded["alice"], entry.id, 1)
    with pytest.raises(FrozenVersion):
        reg.update_version_file(seeded["alice"], entry.id, 1, "new.txt", b"x")
    # freezing blocks mutation, not succession
    v2 = reg.add_version(seeded["alice"], entry.id, upload_spec())
    assert v2.version == 2


def test_freeze_is_idempotent(seeded):
    reg = seeded["registry"]
    entry = register(seeded)
    events_before = len(reg.store.events())
    reg.freeze_version(seeded["alice"], entry.id, 1)
    reg.freeze_version(seeded["alice"], entry.id, 1)
    assert reg.get_entry(entry.id).get_version(1).frozen
    assert len(reg.store.events()) == events_before  # freeze emits no event


def test_unfrozen_file_mutation(seeded):
    reg = seeded["registry"]
    entry = register(seeded)
    reg.update_version_file(seeded["alice"], entry.id, 1, "notes.txt", b"hello")
    assert reg.get_entry(entry.id).get_version(1).files["notes.txt"].content == b"hello"
    reg.update_version_file(seeded["alice"], entry.id, 1, "notes.txt", None)
    assert "notes.txt" not in reg.get_entry(entry.id).get_version(1).files


def test_main_file_cannot_be_deleted(seeded):
    reg = seeded["registry"]
    entry = register(seeded)
    with pytest.raises(InvalidInput):
        reg.update_version_file(seeded["alice"], entry.id, 1, "wf.ga", None)


# ---------------------------------------------------------------------------
# Metadata updates
# ---------------------------------------------------------------------------


def test_update_maturity_emits_event(seeded):
    reg = seeded["registry"]
    entry = register(seeded)
    updated = reg.update_metadata(seeded["alice"], entry.id, {"maturity": "stable"})
    assert updated.maturity == Maturity.STABLE
    kinds = [e["kind"] for e in reg.store.events() if e["entry_id"] == entry.id]
    assert kinds.count("metadata_changed") == 1


def test_patch_clearing_title_rejected(seeded):
    entry = register(seeded)
    with pytest.raises(ValidationFailed):
        seeded["registry"].update_metadata(seeded["alice"], entry.id, {"title": ""})


def test_attribution_cycle_rejected(seeded):
    reg = seeded["registry"]
    a = register(seeded, title="A")
    b = register(seeded, title="B")
    reg.update_metadata(seeded["alice"], a.id, {"attributions": [b.id]})
    with pytest.raises(AttributionCycle):
        reg.update_metadata(seeded["alice"], b.id, {"attributions": [a.id]})


def test_self_attribution_rejected(seeded):
    reg = seeded["registry"]
    entry = register(seeded)
    with pytest.raises(AttributionCycle):
        reg.update_metadata(seeded["alice"], entry.id, {"attributions": [entry.id]})


def test_non_wizard_field_rejected(seeded):
    entry = register(seeded)
    with pytest.raises(InvalidInput):
        seeded["registry"].update_metadata(seeded["alice"], entry.id, {"metrics": {"views": 999}})


# ---------------------------------------------------------------------------
# DOI
# ---------------------------------------------------------------------------


def make_public(seeded, entry):
    return seeded["registry"].update_metadata(
        seeded["alice"], entry.id, {"policy": {"visibility": "public", "grants": []}}
    )


def test_mint_doi_freezes_and_uses_prefix(seeded):
    reg = seeded["registry"]
    entry = make_public(seeded, register(seeded))
    record = reg.mint_doi(seeded["alice"], entry.id, 1)
    assert record.doi == f"10.77777/wfhub.{entry.id}.1"
    assert reg.get_entry(entry.id).get_version(1).frozen
    # mock client transcript
    assert reg.doi_client.minted[0][0] == record.doi
    payload = reg.doi_client.minted[0][1]["data"]["attributes"]
    assert payload["types"]["resourceTypeGeneral"] == "Workflow"
    assert payload["titles"] == [{"title": entry.title}]


def test_mint_doi_idempotent(seeded):
    reg = seeded["registry"]
    entry = make_public(seeded, register(seeded))
    first = reg.mint_doi(seeded["alice"], entry.id, 1)
    second = reg.mint_doi(seeded["alice"], entry.id, 1)
    assert first.doi == second.doi
    assert len(reg.doi_client.minted) == 1  # client called once
    kinds = [e["kind"] for e in reg.store.events() if e["kind"] == "doi_minted"]
    assert len(kinds) == 1


def test_mint_doi_private_entry_rejected(seeded):
    reg = seeded["registry"]
    entry = register(seeded)  # team default policy is private
    with pytest.raises(VisibilityRequired):
        reg.mint_doi(seeded["alice"], entry.id, 1)


def test_mint_failure_leaves_no_record(seeded):
    reg = seeded["registry"]
    entry = make_public(seeded, register(seeded))
    reg.doi_client.fail_next = True
    from flowhub.errors import MintFailed

    with pytest.raises(MintFailed):
        reg.mint_doi(seeded["alice"], entry.id, 1)
    assert reg.get_entry(entry.id).doi_records == {}
    assert not reg.get_entry(entry.id).get_version(1).frozen
    record = reg.mint_doi(seeded["alice"], entry.id, 1)  # retry succeeds
    assert record.doi.endswith(".1")


def test_doi_state_machine_model_based(seeded):
    """Random action sequences against a simple reference model."""
    reg = seeded["registry"]
    entry = make_public(seeded, register(seeded))
    alice = seeded["alice"]
    rng = random.Random(7)

    model_versions = {1: {"frozen": False, "doi": None}}
    for step in range(120):
        action = rng.choice(["add_version", "freeze", "mint_doi", "mutate_files"])
        version = rng.choice(sorted(model_versions))
        if action == "add_version":
            new = reg.add_version(alice, entry.id, upload_spec()).version
            assert new == max(model_versions) + 1  # monotone, no reuse
            model_versions[new] = {"frozen": False, "doi": None}
        elif action == "freeze":
            reg.freeze_version(alice, entry.id, version)
            model_versions[version]["frozen"] = True
        elif action == "mint_doi":
            record = reg.mint_doi(alice, entry.id, version)
            if model_versions[version]["doi"] is None:
                model_versions[version]["doi"] = record.doi
            assert record.doi == model_versions[version]["doi"]  # idempotent
            model_versions[version]["frozen"] = True  # mint implies freeze
        else:
            if model_versions[version]["frozen"]:
                with pytest.raises(FrozenVersion):
                    reg.update_version_file(alice, entry.id, version, "scratch.txt", b"x")
            else:
                reg.update_version_file(alice, entry.id, version, "scratch.txt", b"x")
        stored = reg.get_entry(entry.id)
        assert [v.version for v in stored.versions] == sorted(model_versions)
        for number, state in model_versions.items():
            assert stored.get_version(number).frozen == state["frozen"]
            if state["doi"]:
                assert stored.doi_records[number] == state["doi"]


# ---------------------------------------------------------------------------
# Metrics and concurrency
# ---------------------------------------------------------------------------


def test_record_activity_counts(seeded):
    reg = seeded["registry"]
    entry = register(seeded)
    metrics = reg.record_activity(entry.id, "view")
    assert (metrics.views, metrics.downloads) == (1, 0)
    reg.record_activity(entry.id, "download")
    stored = reg.get_entry(entry.id)
    assert (stored.metrics.views, stored.metrics.downloads) == (1, 1)


def test_record_activity_unknown_entry(seeded):
    with pytest.raises(NotFoundError):
        seeded["registry"].record_activity("w999999", "view")


def test_concurrent_downloads_count_exactly(seeded):
    reg = seeded["registry"]
    entry = register(seeded)
    threads = [
        threading.Thread(target=reg.record_activity, args=(entry.id, "download"))
        for _ in range(100)
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert reg.get_entry(entry.id).metrics.downloads == 100


def test_concurrent_add_version_sequential(seeded):
    reg = seeded["registry"]
    entry = register(seeded)
    errors = []

    def add():
        try:
            reg.add_version(seeded["alice"], entry.id, upload_spec())
        except Exception as exc:  # noqa: BLE001 - collected for the assertion
            errors.append(exc)

    threads = [threading.Thread(target=add) for _ in range(20)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    numbers = [v.version for v in reg.get_entry(entry.id).versions]
    assert numbers == list(range(1, 22))  # strictly sequential, no gaps


# ---------------------------------------------------------------------------
# Collections
# ---------------------------------------------------------------------------


def test_collection_lifecycle(seeded):
    reg = seeded["registry"]
    a, b = register(seeded, title="A"), register(seeded, title="B")
    coll = reg.create_collection(
        seeded["alice"], "Annotation workflows", curator_team_ids=[seeded["team"].id]
    )
    reg.add_collection_item(seeded["alice"], coll.id, ItemKind.WORKFLOW, a.id)
    coll = reg.add_collection_item(seeded["alice"], coll.id, ItemKind.WORKFLOW, b.id)
    assert len(coll.items) == 2
    assert {c.id for c in reg.collections_containing(a.id)} == {coll.id}
    with pytest.raises(DuplicateItem):
        reg.add_collection_item(seeded["alice"], coll.id, ItemKind.WORKFLOW, a.id)
    reg.delete_collection(seeded["alice"], coll.id)
    assert reg.collections_containing(a.id) == []
    assert reg.get_entry(a.id).id == a.id  # workflows untouched


def test_collection_requires_curator(seeded):
    reg = seeded["registry"]
    coll = reg.create_collection(seeded["alice"], "C", curator_team_ids=[seeded["team"].id])
    with pytest.raises(AccessDenied):
        reg.add_collection_item(seeded["bob"], coll.id, ItemKind.DOCUMENT, "https://example.org/doc")


# ---------------------------------------------------------------------------
# Subscriptions
# ---------------------------------------------------------------------------


def test_subscribe_then_new_version(seeded):
    reg = seeded["registry"]
    entry = make_public(seeded, register(seeded))
    reg.subscribe(seeded["bob"], entry.id)
    reg.add_version(seeded["alice"], entry.id, upload_spec())
    events = reg.list_notifications(seeded["bob"])
    assert [e["kind"] for e in events][0] == "new_version"


def test_unsubscribed_user_sees_nothing(seeded):
    reg = seeded["registry"]
    entry = make_public(seeded, register(seeded))
    reg.add_version(seeded["alice"], entry.id, upload_spec())
    assert reg.list_notifications(seeded["bob"]) == []


def test_duplicate_subscription_noop(seeded):
    reg = seeded["registry"]
    entry = make_public(seeded, register(seeded))
    reg.subscribe(seeded["bob"], entry.id)
    reg.subscribe(seeded["bob"], entry.id)
    assert reg.subscriptions_of(seeded["bob"]) == {entry.id}


def test_notifications_newest_first(seeded):
    reg = seeded["registry"]
    entry = make_public(seeded, register(seeded))
    reg.subscribe(seeded["bob"], entry.id)
    reg.update_metadata(seeded["alice"], entry.id, {"tags": ["one"]})
    reg.update_metadata(seeded["alice"], entry.id, {"tags": ["two"]})
    events = reg.list_notifications(seeded["bob"])
    assert [e["seq"] for e in events] == sorted((e["seq"] for e in events), reverse=True)


# ---------------------------------------------------------------------------
# Entity management
# ---------------------------------------------------------------------------


def test_default_space_exists_and_is_unique(reg):
    spaces = [reg.get_space(i) for i in reg.store.ids("space")]
    defaults = [s for s in spaces if s.is_default]
    assert len(defaults) == 1
    assert defaults[0].name == "Independent Teams"


def test_default_space_cannot_be_deleted(seeded):
    with pytest.raises(AccessDenied):
        seeded["registry"].delete_space(seeded["admin"], seeded["registry"].default_space().id)


def test_space_creation_requires_site_admin(seeded):
    with pytest.raises(AccessDenied):
        seeded["registry"].create_space(seeded["alice"], "Rogue Space")
    space = seeded["registry"].create_space(seeded["admin"], "Consortium")
    assert seeded["admin"].id in space.admin_user_ids


def test_create_team_without_space_rejected(seeded):
    with pytest.raises(InvalidInput):
        seeded["registry"].create_team(seeded["alice"], "No Home", None)


def test_team_with_entries_cannot_be_deleted(seeded):
    reg = seeded["registry"]
    register(seeded)
    with pytest.raises(Conflict):
        reg.delete_team(seeded["alice"], seeded["team"].id)


def test_join_team_records_membership(seeded):
    reg = seeded["registry"]
    org = reg.create_organisation("University of Elsewhere", "AU")
    # per-team affiliations must be a subset of the user's organisations
    with pytest.raises(InvalidInput):
        reg.add_team_member(
            seeded["alice"], seeded["team"].id, seeded["bob"].id, organisation_ids=[org.id]
        )
    from flowhub import serde

    bob_doc = reg.get_user(seeded["bob"].id)
    bob_doc.organisation_ids.add(org.id)
    reg.store.put("user", bob_doc.id, serde.user_to_dict(bob_doc))
    team = reg.add_team_member(
        seeded["alice"], seeded["team"].id, seeded["bob"].id, organisation_ids=[org.id]
    )
    assert seeded["bob"].id in team.member_ids()
    assert reg.get_user(seeded["bob"].id).membership_for(team.id).organisation_ids == {org.id}


def test_organisation_name_unique_case_insensitive(reg):
    reg.create_organisation("CRS4")
    with pytest.raises(Conflict):
        reg.create_organisation("crs4")


def test_asset_exactly_one_content_source(seeded):
    reg = seeded["registry"]
    with pytest.raises(InvalidInput):
        reg.create_asset(
            seeded["alice"], ItemKind.DOCUMENT, "Doc",
            team_ids=[seeded["team"].id],
            files={"doc.md": b"x"}, external_url="https://example.org",
        )
    asset = reg.create_asset(
        seeded["alice"], ItemKind.SOP, "Protocol",
        team_ids=[seeded["team"].id], external_url="https://example.org/sop",
    )
    assert asset.external_url and asset.files is None


# ---------------------------------------------------------------------------
# Persistence across restarts
# ---------------------------------------------------------------------------


def test_file_backed_store_round_trip(tmp_path, seeded):
    config = RegistryConfig(store_dir=str(tmp_path / "store"))
    reg = Registry(Store(config.store_dir), config)
    user, _ = reg.create_user("Persistent Person")
    team = reg.create_team(user, "Disk Team", reg.default_space().id)
    entry = reg.register_workflow(
        user, upload_spec(), {"title": "On disk", "team_ids": [team.id]}
    )
    reg.record_activity(entry.id, "view")

    reopened = Registry(Store(config.store_dir), config)
    loaded = reopened.get_entry(entry.id)
    assert loaded.title == "On disk"
    assert loaded.metrics.views == 1
    assert loaded.versions[0].files["wf.ga"].content == GALAXY
    assert reopened.search(user, SearchQuery(text="disk")).total == 1


def test_auth_tokens(seeded):
    reg = seeded["registry"]
    token, _ = reg.issue_token(seeded["alice"].id, seeded["alice_key"])
    assert reg.resolve_token(token).id == seeded["alice"].id
    assert reg.resolve_token("bogus") is None
    with pytest.raises(AuthRequired):
        reg.issue_token(seeded["alice"].id, "wrong-key")


def test_token_expiry(seeded):
    reg = seeded["registry"]
    clockbox = {"now": datetime(2025, 1, 1, tzinfo=timezone.utc)}
    reg.clock = lambda: clockbox["now"]
    token, _ = reg.issue_token(seeded["alice"].id, seeded["alice_key"])
    assert reg.resolve_token(token) is not None
    clockbox["now"] = datetime(2025, 1, 3, tzinfo=timezone.utc)
    assert reg.resolve_token(token) is None
