"""Native JSON API: CRUD plus the actions surface."""

from __future__ import annotations

import base64
import binascii
from typing import Literal

from fastapi import APIRouter, Depends, Request, Response
from pydantic import BaseModel, Field

from ..errors import BadQuery, InvalidInput
from ..model import ItemKind, Right, Role, User
from ..registry import CrateSpec, GitSpec, Registry, SearchQuery, UploadSpec
from ..registry.search import FACETS
from .. import serde
from .deps import entry_for, get_actor, get_registry, require_actor
from .views import entry_detail, search_view, structure_view, version_view

router = APIRouter()

RESERVED_QUERY_KEYS = {"q", "sort", "order", "page", "page_size"}


# -- request bodies -----------------------------------------------------------


class SourceBody(BaseModel):
    kind: Literal["upload", "git", "crate"]
    files: dict[str, str] | None = None  # path -> base64 content
    main_path: str | None = None
    media_types: dict[str, str] = Field(default_factory=dict)
    remote: str | None = None
    ref: str | None = None
    archive_b64: str | None = None

    def to_spec(self):
        if self.kind == "upload":
            if not self.files or not self.main_path:
                raise InvalidInput("upload sources need files and a main_path")
            return UploadSpec(files=_decode_files(self.files), main_path=self.main_path,
                              media_types=self.media_types)
        if self.kind == "git":
            if not self.remote:
                raise InvalidInput("git sources need a remote")
            return GitSpec(remote=self.remote, ref=self.ref)
        if not self.archive_b64:
            raise InvalidInput("crate sources need archive_b64")
        return CrateSpec(archive=_decode_b64(self.archive_b64, "archive_b64"))


class RegisterBody(BaseModel):
    source: SourceBody
    metadata: dict = Field(default_factory=dict)


class TokenBody(BaseModel):
    user_id: str
    api_key: str


class PersonBody(BaseModel):
    display_name: str
    orcid: str | None = None
    organisation_ids: list[str] = Field(default_factory=list)
    expertise_tags: list[str] = Field(default_factory=list)


class TeamBody(BaseModel):
    name: str
    space_id: str | None = None
    description: str = ""
    default_license: str | None = None
    organisation_ids: list[str] = Field(default_factory=list)


class MemberBody(BaseModel):
    user_id: str
    role: Literal["admin", "member"] = "member"
    organisation_ids: list[str] = Field(default_factory=list)


class SpaceBody(BaseModel):
    name: str
    description: str = ""


class OrganisationBody(BaseModel):
    name: str
    country: str | None = None


class CollectionBody(BaseModel):
    title: str
    description: str = ""
    curator_team_ids: list[str]


class CollectionItemBody(BaseModel):
    kind: Literal["workflow", "document", "sop", "publication", "presentation", "data_file", "event"]
    target: str


def _decode_b64(data: str, what: str) -> bytes:
    try:
        return base64.b64decode(data, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise InvalidInput(f"{what} is not valid base64") from exc


def _decode_files(files: dict[str, str]) -> dict[str, bytes]:
    return {path: _decode_b64(content, path) for path, content in files.items()}


# -- auth ----------------------------------------------------------------------


@router.post("/auth/token")
def issue_token(body: TokenBody, registry: Registry = Depends(get_registry)):
    token, expires = registry.issue_token(body.user_id, body.api_key)
    return {"token": token, "expires_at": expires.isoformat()}


# -- workflows -------------------------------------------------------------------


@router.get("/workflows")
def list_workflows(
    page: int = 1,
    page_size: int = 20,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    result = registry.search(actor, SearchQuery(page=page, page_size=page_size, sort_key="created", sort_dir="asc"))
    return search_view(result)


@router.post("/workflows", status_code=201)
def register_workflow(
    body: RegisterBody,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    entry = registry.register_workflow(actor, body.source.to_spec(), body.metadata)
    return entry_detail(registry, entry)


@router.post("/workflows/preview")
def preview_registration(
    body: RegisterBody,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    preview = registry.preview_registration(body.source.to_spec(), body.metadata)
    return {
        "prefill": preview.prefill,
        "detected_class": preview.detected_class,
        "main_path": preview.main_path,
        "errors": [vars(f) for f in preview.report_errors],
        "warnings": [vars(f) for f in preview.report_warnings],
        "structure": structure_view(preview.structure),
    }


@router.post("/workflows/submit_crate", status_code=201)
async def submit_crate(
    request: Request,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    archive = await request.body()
    if not archive:
        raise InvalidInput("request body must be the crate zip")
    overrides: dict = {}
    teams = request.query_params.getlist("team")
    if teams:
        overrides["team_ids"] = teams
    if request.query_params.get("title"):
        overrides["title"] = request.query_params["title"]
    entry = registry.register_workflow(actor, CrateSpec(archive), overrides)
    return entry_detail(registry, entry)


@router.get("/workflows/{entry_id}")
def get_workflow(
    entry_id: str,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    entry = entry_for(registry, actor, entry_id, Right.VIEW)
    return entry_detail(registry, entry)


@router.patch("/workflows/{entry_id}")
def patch_workflow(
    entry_id: str,
    patch: dict,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    entry = registry.update_metadata(actor, entry_id, patch)
    return entry_detail(registry, entry)


@router.delete("/workflows/{entry_id}", status_code=204)
def delete_workflow(
    entry_id: str,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    registry.delete_entry(actor, entry_id)
    return Response(status_code=204)


@router.post("/workflows/{entry_id}/versions", status_code=201)
def add_version(
    entry_id: str,
    body: RegisterBody,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    comment = str(body.metadata.get("revision_comment", ""))
    version = registry.add_version(actor, entry_id, body.source.to_spec(), comment=comment)
    return version_view(registry.get_entry(entry_id), version)


@router.post("/workflows/{entry_id}/versions/{version}/freeze")
def freeze_version(
    entry_id: str,
    version: int,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    registry.freeze_version(actor, entry_id, version)
    return {"entry_id": entry_id, "version": version, "frozen": True}


@router.post("/workflows/{entry_id}/versions/{version}/doi", status_code=201)
def mint_doi(
    entry_id: str,
    version: int,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    record = registry.mint_doi(actor, entry_id, version)
    return {
        "doi": record.doi,
        "entry_id": record.entry_id,
        "version": record.version,
        "minted_at": record.minted_at.isoformat(),
        "datacite": record.datacite_payload,
    }


@router.put("/workflows/{entry_id}/versions/{version}/files/{path:path}")
async def put_version_file(
    entry_id: str,
    version: int,
    path: str,
    request: Request,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    content = await request.body()
    media_type = request.headers.get("content-type")
    registry.update_version_file(actor, entry_id, version, path, content, media_type)
    return {"entry_id": entry_id, "version": version, "path": path, "size": len(content)}


@router.delete("/workflows/{entry_id}/versions/{version}/files/{path:path}", status_code=204)
def delete_version_file(
    entry_id: str,
    version: int,
    path: str,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    registry.update_version_file(actor, entry_id, version, path, None)
    return Response(status_code=204)


@router.get("/workflows/{entry_id}/ro_crate")
def download_crate(
    entry_id: str,
    version: int | None = None,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    entry = entry_for(registry, actor, entry_id, Right.DOWNLOAD)
    archive = registry.export_crate(actor, entry_id, version)
    registry.record_activity(entry_id, "download")
    filename = f"{entry.id}-v{version or (entry.head().version if entry.head() else 1)}.crate.zip"
    return Response(
        content=archive,
        media_type="application/zip",
        headers={"Content-Disposition": f'attachment; filename="{filename}"'},
    )


@router.post("/workflows/{entry_id}/subscribe")
def subscribe(
    entry_id: str,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    registry.subscribe(actor, entry_id)
    return {"entry_id": entry_id, "subscribed": True}


@router.delete("/workflows/{entry_id}/subscribe")
def unsubscribe(
    entry_id: str,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    registry.unsubscribe(actor, entry_id)
    return {"entry_id": entry_id, "subscribed": False}


@router.post("/workflows/{entry_id}/sync")
def sync_releases(
    entry_id: str,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    created = registry.sync_git_releases(actor, entry_id)
    entry = registry.get_entry(entry_id)
    return {"created": [version_view(entry, v) for v in created]}


@router.get("/workflows/{entry_id}/credit")
def credit(
    entry_id: str,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    entry_for(registry, actor, entry_id, Right.VIEW)
    graph = registry.resolve_credit(entry_id)
    return {
        "entry_id": graph.entry_id,
        "creators": [serde.creator_to_dict(c) for c in graph.creators],
        "contributors": graph.contributors,
        "submitter": graph.submitter,
        "team_ids": graph.team_ids,
        "space_ids": graph.space_ids,
        "organisation_ids": graph.organisation_ids,
        "derived_from": graph.derived_from,
        "edges": [list(edge) for edge in graph.edges],
    }


# -- search -----------------------------------------------------------------------


@router.get("/search")
def search(
    request: Request,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    params = request.query_params
    filters: dict[str, set[str]] = {}
    for key in params.keys():
        if key in RESERVED_QUERY_KEYS:
            continue
        if key not in FACETS:
            raise BadQuery(f"unknown facet {key!r}; valid facets: {', '.join(FACETS)}")
        filters[key] = set(params.getlist(key))
    sort = params.get("sort", "updated")
    if ":" in sort:
        sort_key, _, sort_dir = sort.partition(":")
    else:
        sort_key, sort_dir = sort, params.get("order", "desc")
    try:
        page = int(params.get("page", "1"))
        page_size = int(params.get("page_size", "20"))
    except ValueError as exc:
        raise BadQuery("page and page_size must be integers") from exc
    query = SearchQuery(
        text=params.get("q"),
        filters=filters,
        sort_key=sort_key,
        sort_dir=sort_dir,
        page=page,
        page_size=page_size,
    )
    return search_view(registry.search(actor, query))


# -- notifications ------------------------------------------------------------------


@router.get("/notifications")
def notifications(
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    return {"events": registry.list_notifications(actor)}


# -- people ----------------------------------------------------------------------------


@router.post("/people", status_code=201)
def create_person(body: PersonBody, registry: Registry = Depends(get_registry)):
    user, api_key = registry.create_user(
        body.display_name,
        orcid=body.orcid,
        organisation_ids=body.organisation_ids,
        expertise_tags=body.expertise_tags,
    )
    return {"user": _person_view(user), "api_key": api_key}


@router.get("/people")
def list_people(registry: Registry = Depends(get_registry)):
    return {"people": [_person_view(registry.get_user(i)) for i in registry.store.ids("user")]}


@router.get("/people/{user_id}")
def get_person(user_id: str, registry: Registry = Depends(get_registry)):
    return _person_view(registry.get_user(user_id))


def _person_view(user: User) -> dict:
    return {
        "id": user.id,
        "display_name": user.display_name,
        "orcid": user.orcid,
        "organisation_ids": sorted(user.organisation_ids),
        "teams": sorted(user.team_ids()),
        "expertise_tags": list(user.expertise_tags),
    }


# -- teams / spaces / organisations ----------------------------------------------------


@router.post("/teams", status_code=201)
def create_team(
    body: TeamBody,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    team = registry.create_team(
        actor,
        body.name,
        body.space_id,
        description=body.description,
        default_license=body.default_license,
        actor_organisation_ids=body.organisation_ids,
    )
    return _team_view(team)


@router.get("/teams")
def list_teams(registry: Registry = Depends(get_registry)):
    return {"teams": [_team_view(t) for t in registry.teams().values()]}


@router.get("/teams/{team_id}")
def get_team(team_id: str, registry: Registry = Depends(get_registry)):
    return _team_view(registry.get_team(team_id))


@router.post("/teams/{team_id}/members")
def add_member(
    team_id: str,
    body: MemberBody,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    team = registry.add_team_member(
        actor, team_id, body.user_id, role=Role(body.role), organisation_ids=body.organisation_ids
    )
    return _team_view(team)


def _team_view(team) -> dict:
    return {
        "id": team.id,
        "name": team.name,
        "space_id": team.space_id,
        "description": team.description,
        "members": [{"user_id": m.user_id, "role": m.role.value} for m in team.members],
        "default_license": team.default_license,
        "default_policy": serde.policy_to_dict(team.default_policy),
    }


@router.post("/spaces", status_code=201)
def create_space(
    body: SpaceBody,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    space = registry.create_space(actor, body.name, body.description)
    return _space_view(space)


@router.get("/spaces")
def list_spaces(registry: Registry = Depends(get_registry)):
    return {"spaces": [_space_view(s) for s in registry.spaces().values()]}


def _space_view(space) -> dict:
    return {
        "id": space.id,
        "name": space.name,
        "description": space.description,
        "admin_user_ids": sorted(space.admin_user_ids),
        "is_default": space.is_default,
    }


@router.post("/organisations", status_code=201)
def create_organisation(
    body: OrganisationBody,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    org = registry.create_organisation(body.name, body.country)
    return {"id": org.id, "name": org.name, "country": org.country}


@router.get("/organisations")
def list_organisations(registry: Registry = Depends(get_registry)):
    return {
        "organisations": [
            {"id": o.id, "name": o.name, "country": o.country}
            for o in registry.organisations().values()
        ]
    }


# -- collections ---------------------------------------------------------------------------


@router.post("/collections", status_code=201)
def create_collection(
    body: CollectionBody,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    coll = registry.create_collection(
        actor, body.title, description=body.description, curator_team_ids=body.curator_team_ids
    )
    return _collection_view(coll)


@router.get("/collections")
def list_collections(registry: Registry = Depends(get_registry)):
    return {
        "collections": [
            _collection_view(registry.get_collection(i)) for i in registry.store.ids("collection")
        ]
    }


@router.get("/collections/{collection_id}")
def get_collection(collection_id: str, registry: Registry = Depends(get_registry)):
    return _collection_view(registry.get_collection(collection_id))


@router.post("/collections/{collection_id}/items")
def add_collection_item(
    collection_id: str,
    body: CollectionItemBody,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    coll = registry.add_collection_item(actor, collection_id, ItemKind(body.kind), body.target)
    return _collection_view(coll)


@router.delete("/collections/{collection_id}/items")
def remove_collection_item(
    collection_id: str,
    kind: str,
    target: str,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    coll = registry.remove_collection_item(actor, collection_id, ItemKind(kind), target)
    return _collection_view(coll)


@router.delete("/collections/{collection_id}", status_code=204)
def delete_collection(
    collection_id: str,
    registry: Registry = Depends(get_registry),
    actor: User = Depends(require_actor),
):
    registry.delete_collection(actor, collection_id)
    return Response(status_code=204)


def _collection_view(coll) -> dict:
    return {
        "id": coll.id,
        "title": coll.title,
        "description": coll.description,
        "curator_team_ids": sorted(coll.curator_team_ids),
        "items": [{"kind": i.kind.value, "target": i.target} for i in coll.items],
    }
