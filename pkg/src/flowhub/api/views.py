"""JSON projections of domain objects for the native API."""

from __future__ import annotations

from ..model import GitSource, WorkflowEntry, WorkflowVersion
from ..registry import Registry
from ..registry.search import EmbargoStub, SearchResult
from .. import serde


def source_view(source) -> dict:
    if isinstance(source, GitSource):
        return {"kind": "git", "remote": source.remote, "commit_id": source.commit_id, "ref": source.ref}
    return {"kind": source.kind}


def version_view(entry: WorkflowEntry, version: WorkflowVersion) -> dict:
    return {
        "version": version.version,
        "main_workflow_path": version.main_workflow_path,
        "diagram_path": version.diagram_path,
        "abstract_cwl_path": version.abstract_cwl_path,
        "source": source_view(version.source),
        "frozen": version.frozen,
        "created_at": version.created_at.isoformat(),
        "revision_comment": version.revision_comment,
        "doi": entry.doi_records.get(version.version),
        "files": [
            {"path": path, "size": len(f.content), "media_type": f.media_type}
            for path, f in sorted(version.files.items())
        ],
    }


def entry_summary(entry: WorkflowEntry) -> dict:
    head = entry.head()
    return {
        "id": entry.id,
        "title": entry.title,
        "workflow_class": entry.workflow_class,
        "maturity": entry.maturity.value,
        "team_ids": sorted(entry.team_ids),
        "tags": list(entry.tags),
        "license": entry.license,
        "visibility": entry.policy.visibility.value,
        "latest_version": head.version if head else None,
        "metrics": {"views": entry.metrics.views, "downloads": entry.metrics.downloads},
        "created_at": entry.created_at.isoformat() if entry.created_at else None,
        "updated_at": entry.updated_at.isoformat() if entry.updated_at else None,
    }


def entry_detail(registry: Registry, entry: WorkflowEntry) -> dict:
    doc = entry_summary(entry)
    head = entry.head()
    structure = None
    if head is not None:
        structure = registry.parse_structure(
            entry.workflow_class, head.files, head.main_workflow_path
        )
    doc.update(
        {
            "description": entry.description,
            "creators": [serde.creator_to_dict(c) for c in entry.creators],
            "other_contributors": entry.other_contributors,
            "submitter": entry.submitter,
            "edam_topics": list(entry.edam_topics),
            "edam_operations": list(entry.edam_operations),
            "tool_refs": [serde.tool_ref_to_dict(t) for t in entry.tool_refs],
            "attributions": list(entry.attributions),
            "custom_citation": entry.custom_citation,
            "test_status": entry.test_status,
            "policy": serde.policy_to_dict(entry.policy),
            "doi_records": {str(k): v for k, v in sorted(entry.doi_records.items())},
            "versions": [version_view(entry, v) for v in sorted(entry.versions, key=lambda v: v.version)],
            "launch": registry.launch_options(entry),
            "collections": [
                {"id": c.id, "title": c.title} for c in registry.collections_containing(entry.id)
            ],
            "structure": structure_view(structure),
            "citation": citation_view(registry, entry),
        }
    )
    return doc


def structure_view(structure) -> dict | None:
    if structure is None:
        return None
    return {
        "name": structure.name,
        "inputs": [{"id": p.id, "data_type": p.data_type, "edam_format": p.edam_format} for p in structure.inputs],
        "outputs": [{"id": p.id, "data_type": p.data_type} for p in structure.outputs],
        "steps": [
            {
                "id": s.id,
                "label": s.label,
                "tool": serde.tool_ref_to_dict(s.tool_ref) if s.tool_ref else None,
                "subworkflow": s.subworkflow,
            }
            for s in structure.steps
        ],
    }


def citation_view(registry: Registry, entry: WorkflowEntry) -> dict:
    """Preferred citation: DOI first, custom text second, canonical URL last."""
    head = entry.head()
    doi = entry.doi_records.get(head.version) if head else None
    if doi:
        return {"kind": "doi", "text": f"https://doi.org/{doi}"}
    if entry.custom_citation:
        return {"kind": "custom", "text": entry.custom_citation}
    return {"kind": "url", "text": f"{registry.config.base_url}/workflows/{entry.id}"}


def stub_view(stub: EmbargoStub) -> dict:
    return {
        "id": stub.id,
        "title": stub.title,
        "workflow_class": stub.workflow_class,
        "team_ids": stub.team_ids,
        "embargo_until": stub.embargo_until,
        "embargoed": True,
    }


def search_view(result: SearchResult) -> dict:
    return {
        "hits": [entry_summary(e) for e in result.hits],
        "total": result.total,
        "page": result.page,
        "page_size": result.page_size,
        "facets": result.facet_counts,
        "embargoed": [stub_view(s) for s in result.embargoed],
    }
