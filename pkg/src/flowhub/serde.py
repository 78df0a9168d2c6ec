"""Canonical JSON encoding for domain objects.

Used by the persistent store and by crate export, so both sides agree
on one wire form.  Version file contents are not inlined: encoders emit
content hashes and take a blob writer/reader so file bytes live in the
content-addressed blob store.
"""

from __future__ import annotations

import hashlib
from datetime import date, datetime, timezone
from typing import Any, Callable

from .model import (
    AccessPolicy,
    Asset,
    Collection,
    CollectionItem,
    Creator,
    CrateSource,
    FileEntry,
    GitSource,
    Grant,
    ItemKind,
    Maturity,
    Membership,
    Metrics,
    Organisation,
    Right,
    Role,
    Space,
    SubjectKind,
    Team,
    TeamMember,
    ToolRef,
    UploadSource,
    User,
    Visibility,
    WorkflowEntry,
    WorkflowVersion,
)

BlobPut = Callable[[bytes], str]
BlobGet = Callable[[str], bytes]


def sha256_hex(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


def _dt(value: datetime | None) -> str | None:
    if value is None:
        return None
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).isoformat()


def _parse_dt(value: str | None) -> datetime | None:
    return datetime.fromisoformat(value) if value else None


# -- access policy ----------------------------------------------------------


def policy_to_dict(policy: AccessPolicy) -> dict[str, Any]:
    return {
        "visibility": policy.visibility.value,
        "embargo_until": policy.embargo_until.isoformat() if policy.embargo_until else None,
        "grants": [
            {"subject_kind": g.subject_kind.value, "subject_id": g.subject_id, "right": g.right.value}
            for g in policy.grants
        ],
    }


def policy_from_dict(doc: dict[str, Any]) -> AccessPolicy:
    return AccessPolicy(
        visibility=Visibility(doc.get("visibility", "private")),
        embargo_until=date.fromisoformat(doc["embargo_until"]) if doc.get("embargo_until") else None,
        grants=[
            Grant(SubjectKind(g["subject_kind"]), g["subject_id"], Right(g["right"]))
            for g in doc.get("grants", [])
        ],
    )


# -- people and hierarchy ---------------------------------------------------


def user_to_dict(user: User) -> dict[str, Any]:
    return {
        "id": user.id,
        "display_name": user.display_name,
        "orcid": user.orcid,
        "organisation_ids": sorted(user.organisation_ids),
        "memberships": [
            {"team_id": m.team_id, "role": m.role.value, "organisation_ids": sorted(m.organisation_ids)}
            for m in user.memberships
        ],
        "expertise_tags": list(user.expertise_tags),
        "site_admin": user.site_admin,
        "api_key_hash": user.api_key_hash,
    }


def user_from_dict(doc: dict[str, Any]) -> User:
    return User(
        id=doc["id"],
        display_name=doc["display_name"],
        orcid=doc.get("orcid"),
        organisation_ids=set(doc.get("organisation_ids", [])),
        memberships=[
            Membership(m["team_id"], Role(m["role"]), set(m.get("organisation_ids", [])))
            for m in doc.get("memberships", [])
        ],
        expertise_tags=list(doc.get("expertise_tags", [])),
        site_admin=doc.get("site_admin", False),
        api_key_hash=doc.get("api_key_hash"),
    )


def organisation_to_dict(org: Organisation) -> dict[str, Any]:
    return {"id": org.id, "name": org.name, "country": org.country}


def organisation_from_dict(doc: dict[str, Any]) -> Organisation:
    return Organisation(doc["id"], doc["name"], doc.get("country"))


def space_to_dict(space: Space) -> dict[str, Any]:
    return {
        "id": space.id,
        "name": space.name,
        "description": space.description,
        "admin_user_ids": sorted(space.admin_user_ids),
        "is_default": space.is_default,
    }


def space_from_dict(doc: dict[str, Any]) -> Space:
    return Space(
        id=doc["id"],
        name=doc["name"],
        description=doc.get("description", ""),
        admin_user_ids=set(doc.get("admin_user_ids", [])),
        is_default=doc.get("is_default", False),
    )


def team_to_dict(team: Team) -> dict[str, Any]:
    return {
        "id": team.id,
        "name": team.name,
        "space_id": team.space_id,
        "description": team.description,
        "members": [{"user_id": m.user_id, "role": m.role.value} for m in team.members],
        "default_policy": policy_to_dict(team.default_policy),
        "default_license": team.default_license,
    }


def team_from_dict(doc: dict[str, Any]) -> Team:
    return Team(
        id=doc["id"],
        name=doc["name"],
        space_id=doc["space_id"],
        description=doc.get("description", ""),
        members=[TeamMember(m["user_id"], Role(m["role"])) for m in doc.get("members", [])],
        default_policy=policy_from_dict(doc.get("default_policy", {})),
        default_license=doc.get("default_license"),
    )


# -- workflow entries -------------------------------------------------------


def creator_to_dict(creator: Creator) -> dict[str, Any]:
    return {"name": creator.name, "orcid": creator.orcid, "affiliation": creator.affiliation}


def creator_from_dict(doc: dict[str, Any]) -> Creator:
    return Creator(doc["name"], doc.get("orcid"), doc.get("affiliation"))


def tool_ref_to_dict(ref: ToolRef) -> dict[str, Any]:
    return {"raw_id": ref.raw_id, "biotools_id": ref.biotools_id, "display_name": ref.display_name}


def tool_ref_from_dict(doc: dict[str, Any]) -> ToolRef:
    return ToolRef(doc["raw_id"], doc.get("biotools_id"), doc.get("display_name", ""))


def _source_to_dict(source) -> dict[str, Any]:
    if isinstance(source, GitSource):
        return {"kind": "git", "remote": source.remote, "commit_id": source.commit_id, "ref": source.ref}
    return {"kind": source.kind}


def _source_from_dict(doc: dict[str, Any]):
    kind = doc.get("kind", "upload")
    if kind == "git":
        return GitSource(doc["remote"], doc["commit_id"], doc.get("ref"))
    if kind == "crate":
        return CrateSource()
    return UploadSource()


def version_to_dict(version: WorkflowVersion, put_blob: BlobPut) -> dict[str, Any]:
    files = {}
    for path in sorted(version.files):
        entry = version.files[path]
        files[path] = {
            "sha256": put_blob(entry.content),
            "media_type": entry.media_type,
            "size": len(entry.content),
        }
    return {
        "version": version.version,
        "files": files,
        "main_workflow_path": version.main_workflow_path,
        "diagram_path": version.diagram_path,
        "abstract_cwl_path": version.abstract_cwl_path,
        "source": _source_to_dict(version.source),
        "frozen": version.frozen,
        "created_at": _dt(version.created_at),
        "revision_comment": version.revision_comment,
    }


def version_from_dict(doc: dict[str, Any], get_blob: BlobGet) -> WorkflowVersion:
    files = {
        path: FileEntry(get_blob(meta["sha256"]), meta.get("media_type", "application/octet-stream"))
        for path, meta in doc.get("files", {}).items()
    }
    return WorkflowVersion(
        version=doc["version"],
        files=files,
        main_workflow_path=doc["main_workflow_path"],
        source=_source_from_dict(doc.get("source", {})),
        created_at=_parse_dt(doc.get("created_at")) or datetime.now(timezone.utc),
        diagram_path=doc.get("diagram_path"),
        abstract_cwl_path=doc.get("abstract_cwl_path"),
        frozen=doc.get("frozen", False),
        revision_comment=doc.get("revision_comment", ""),
    )


def entry_to_dict(entry: WorkflowEntry, put_blob: BlobPut) -> dict[str, Any]:
    return {
        "id": entry.id,
        "title": entry.title,
        "team_ids": sorted(entry.team_ids),
        "submitter": entry.submitter,
        "workflow_class": entry.workflow_class,
        "creators": [creator_to_dict(c) for c in entry.creators],
        "other_contributors": entry.other_contributors,
        "description": entry.description,
        "maturity": entry.maturity.value,
        "license": entry.license,
        "tags": list(entry.tags),
        "edam_topics": list(entry.edam_topics),
        "edam_operations": list(entry.edam_operations),
        "tool_refs": [tool_ref_to_dict(t) for t in entry.tool_refs],
        "attributions": list(entry.attributions),
        "custom_citation": entry.custom_citation,
        "test_status": entry.test_status,
        "versions": [version_to_dict(v, put_blob) for v in sorted(entry.versions, key=lambda v: v.version)],
        "metrics": {"views": entry.metrics.views, "downloads": entry.metrics.downloads},
        "policy": policy_to_dict(entry.policy),
        "doi_records": {str(k): v for k, v in sorted(entry.doi_records.items())},
        "created_at": _dt(entry.created_at),
        "updated_at": _dt(entry.updated_at),
    }


def entry_from_dict(doc: dict[str, Any], get_blob: BlobGet) -> WorkflowEntry:
    metrics = doc.get("metrics", {})
    return WorkflowEntry(
        id=doc["id"],
        title=doc["title"],
        team_ids=set(doc.get("team_ids", [])),
        submitter=doc["submitter"],
        workflow_class=doc.get("workflow_class", "other"),
        creators=[creator_from_dict(c) for c in doc.get("creators", [])],
        other_contributors=doc.get("other_contributors", ""),
        description=doc.get("description", ""),
        maturity=Maturity(doc.get("maturity", "work_in_progress")),
        license=doc.get("license"),
        tags=list(doc.get("tags", [])),
        edam_topics=list(doc.get("edam_topics", [])),
        edam_operations=list(doc.get("edam_operations", [])),
        tool_refs=[tool_ref_from_dict(t) for t in doc.get("tool_refs", [])],
        attributions=list(doc.get("attributions", [])),
        custom_citation=doc.get("custom_citation"),
        test_status=doc.get("test_status"),
        versions=[version_from_dict(v, get_blob) for v in doc.get("versions", [])],
        metrics=Metrics(metrics.get("views", 0), metrics.get("downloads", 0)),
        policy=policy_from_dict(doc.get("policy", {})),
        doi_records={int(k): v for k, v in doc.get("doi_records", {}).items()},
        created_at=_parse_dt(doc.get("created_at")),
        updated_at=_parse_dt(doc.get("updated_at")),
    )


# -- collections and assets -------------------------------------------------


def collection_to_dict(coll: Collection) -> dict[str, Any]:
    return {
        "id": coll.id,
        "title": coll.title,
        "description": coll.description,
        "curator_team_ids": sorted(coll.curator_team_ids),
        "items": [{"kind": i.kind.value, "target": i.target} for i in coll.items],
    }


def collection_from_dict(doc: dict[str, Any]) -> Collection:
    return Collection(
        id=doc["id"],
        title=doc["title"],
        description=doc.get("description", ""),
        curator_team_ids=set(doc.get("curator_team_ids", [])),
        items=[CollectionItem(ItemKind(i["kind"]), i["target"]) for i in doc.get("items", [])],
    )


def asset_to_dict(asset: Asset, put_blob: BlobPut) -> dict[str, Any]:
    files = None
    if asset.files is not None:
        files = {
            path: {"sha256": put_blob(f.content), "media_type": f.media_type, "size": len(f.content)}
            for path, f in sorted(asset.files.items())
        }
    return {
        "id": asset.id,
        "kind": asset.kind.value,
        "title": asset.title,
        "team_ids": sorted(asset.team_ids),
        "files": files,
        "external_url": asset.external_url,
        "citation_text": asset.citation_text,
        "policy": policy_to_dict(asset.policy),
    }


def asset_from_dict(doc: dict[str, Any], get_blob: BlobGet) -> Asset:
    files = None
    if doc.get("files") is not None:
        files = {
            path: FileEntry(get_blob(meta["sha256"]), meta.get("media_type", "application/octet-stream"))
            for path, meta in doc["files"].items()
        }
    return Asset(
        id=doc["id"],
        kind=ItemKind(doc["kind"]),
        title=doc["title"],
        team_ids=set(doc.get("team_ids", [])),
        files=files,
        external_url=doc.get("external_url"),
        citation_text=doc.get("citation_text", ""),
        policy=policy_from_dict(doc.get("policy", {})),
    )
