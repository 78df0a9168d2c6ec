"""GA4GH Tool Registry Service v2 read surface.

Tool ids take the form ``#workflow/<entry-id>`` and arrive URL-encoded;
only entries the (optionally authenticated) caller may view appear.
Descriptor fetches return the stored main workflow file verbatim.
"""

from __future__ import annotations

from urllib.parse import quote

from fastapi import APIRouter, Depends, Request, Response

from .. import __version__
from ..errors import NotFoundError
from ..model import Right, User, WorkflowEntry, WorkflowVersion
from ..parsers.detect import OTHER_CLASS_ID
from ..registry import Registry
from .deps import get_actor, get_registry

router = APIRouter()

TOOL_ID_PREFIX = "#workflow/"

TOOL_CLASS = {
    "id": "workflow",
    "name": "Workflow",
    "description": "A computational workflow",
}


def trs_id(entry_id: str) -> str:
    return f"{TOOL_ID_PREFIX}{entry_id}"


def _entry_id_from(tool_id: str) -> str:
    if not tool_id.startswith(TOOL_ID_PREFIX):
        raise NotFoundError(f"unknown tool {tool_id!r}")
    return tool_id[len(TOOL_ID_PREFIX):]


def _visible_entries(registry: Registry, actor: User | None) -> list[WorkflowEntry]:
    entries = []
    for entry in registry.all_entries():
        if registry.check_access(actor, entry, Right.VIEW).allow:
            entries.append(entry)
    return sorted(entries, key=lambda e: e.id)


def _descriptor_types(registry: Registry, entry: WorkflowEntry) -> list[str]:
    cls = registry.classes.get(entry.workflow_class)
    if cls is None:
        return [f"PLAIN_{entry.workflow_class.upper()}"]
    return [cls.descriptor_token]


def _tool_url(registry: Registry, entry: WorkflowEntry) -> str:
    return f"{registry.config.base_url}/ga4gh/trs/v2/tools/{quote(trs_id(entry.id), safe='')}"


def _version_view(registry: Registry, entry: WorkflowEntry, version: WorkflowVersion) -> dict:
    return {
        "id": str(version.version),
        "name": f"v{version.version}",
        "url": f"{_tool_url(registry, entry)}/versions/{version.version}",
        "descriptor_type": _descriptor_types(registry, entry),
        "author": [c.name for c in entry.creators],
        "meta_version": version.created_at.isoformat(),
        "verified": False,
        "is_production": entry.maturity.value == "stable",
    }


def _tool_view(registry: Registry, entry: WorkflowEntry) -> dict:
    organization = ""
    for team_id in sorted(entry.team_ids):
        doc = registry.store.get("team", team_id)
        if doc:
            organization = doc["name"]
            break
    return {
        "id": trs_id(entry.id),
        "url": _tool_url(registry, entry),
        "name": entry.title,
        "description": entry.description,
        "organization": organization,
        "toolclass": TOOL_CLASS,
        "versions": [
            _version_view(registry, entry, v)
            for v in sorted(entry.versions, key=lambda v: v.version)
        ],
    }


def _load_tool(registry: Registry, actor: User | None, tool_id: str) -> WorkflowEntry:
    entry_id = _entry_id_from(tool_id)
    try:
        entry = registry.get_entry(entry_id)
    except NotFoundError:
        raise NotFoundError(f"unknown tool {tool_id!r}") from None
    if not registry.check_access(actor, entry, Right.VIEW).allow:
        raise NotFoundError(f"unknown tool {tool_id!r}")  # no existence leaks over TRS
    return entry


def _load_version(entry: WorkflowEntry, version_id: str) -> WorkflowVersion:
    try:
        number = int(version_id)
    except ValueError:
        raise NotFoundError(f"unknown version {version_id!r}") from None
    version = entry.get_version(number)
    if version is None:
        raise NotFoundError(f"unknown version {version_id!r}")
    return version


# -- routes (most specific first: tool ids contain a slash) ---------------------


@router.get("/service-info")
def service_info(registry: Registry = Depends(get_registry)):
    return {
        "id": "org.flowhub.trs",
        "name": registry.config.registry_name,
        "description": "Tool Registry Service endpoint of the workflow registry",
        "type": {"group": "org.ga4gh", "artifact": "trs", "version": "2.0.0"},
        "organization": {"name": registry.config.registry_name, "url": registry.config.base_url},
        "version": __version__,
    }


@router.get("/toolClasses")
def tool_classes():
    return [TOOL_CLASS]


@router.get("/tools")
def list_tools(
    request: Request,
    response: Response,
    toolname: str | None = None,
    descriptorType: str | None = None,
    offset: int = 0,
    limit: int = 100,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    tools = []
    for entry in _visible_entries(registry, actor):
        if toolname and toolname.lower() not in entry.title.lower():
            continue
        if descriptorType and descriptorType not in _descriptor_types(registry, entry):
            continue
        tools.append(_tool_view(registry, entry))
    window = tools[offset : offset + limit]
    response.headers["current_offset"] = str(offset)
    response.headers["current_limit"] = str(limit)
    response.headers["self_link"] = str(request.url)
    return window


@router.get("/tools/{tool_id:path}/versions/{version_id}/{descriptor_type}/descriptor")
def descriptor(
    tool_id: str,
    version_id: str,
    descriptor_type: str,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    entry = _load_tool(registry, actor, tool_id)
    version = _load_version(entry, version_id)
    if descriptor_type not in _descriptor_types(registry, entry):
        raise NotFoundError(f"tool has no {descriptor_type!r} descriptor")
    content = version.files[version.main_workflow_path].content
    return Response(content=content, media_type="text/plain; charset=utf-8")


@router.get("/tools/{tool_id:path}/versions/{version_id}/{descriptor_type}/files")
def files(
    tool_id: str,
    version_id: str,
    descriptor_type: str,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    entry = _load_tool(registry, actor, tool_id)
    version = _load_version(entry, version_id)
    if descriptor_type not in _descriptor_types(registry, entry):
        raise NotFoundError(f"tool has no {descriptor_type!r} descriptor")
    listing = []
    for path in sorted(version.files):
        listing.append({"path": path, "file_type": _file_type(registry, entry, version, path)})
    return listing


def _file_type(registry, entry, version, path: str) -> str:
    from ..parsers import detect_class
    from ..parsers.detect import MAX_PARSE_BYTES

    if path == version.main_workflow_path:
        return "PRIMARY_DESCRIPTOR"
    parts = path.lower().split("/")
    if any(p in ("test", "tests", "testdata", "test-data") for p in parts[:-1]) or parts[-1].startswith("test"):
        return "TEST_FILE"
    if path == version.abstract_cwl_path:
        return "SECONDARY_DESCRIPTOR"
    content = version.files[path].content
    if len(content) <= MAX_PARSE_BYTES:
        detected = detect_class(path, content, registry=registry.classes)
        if detected == entry.workflow_class and detected != OTHER_CLASS_ID:
            return "SECONDARY_DESCRIPTOR"
    return "OTHER"


@router.get("/tools/{tool_id:path}/versions/{version_id}")
def tool_version(
    tool_id: str,
    version_id: str,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    entry = _load_tool(registry, actor, tool_id)
    version = _load_version(entry, version_id)
    return _version_view(registry, entry, version)


@router.get("/tools/{tool_id:path}/versions")
def tool_versions(
    tool_id: str,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    entry = _load_tool(registry, actor, tool_id)
    return [
        _version_view(registry, entry, v) for v in sorted(entry.versions, key=lambda v: v.version)
    ]


@router.get("/tools/{tool_id:path}")
def tool(
    tool_id: str,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    entry = _load_tool(registry, actor, tool_id)
    return _tool_view(registry, entry)
