"""Crate export: package an entry version as a Workflow-RO-Crate.

The archive is deterministic for identical inputs: entries are written
in a fixed order with the version's creation time as the only timestamp,
and the metadata document is serialised with sorted keys.
"""

from __future__ import annotations

import json

from ..errors import CrateBuildError
from ..model import WorkflowEntry, WorkflowVersion, is_valid_orcid
from ..parsers import default_registry
from ..serde import policy_to_dict
from .common import (
    BIOTOOLS_PREFIX,
    CRATE_CONTEXT,
    CRATE_SPEC_IRI,
    EDAM_PREFIX,
    METADATA_FILENAME,
    ORCID_PREFIX,
    PROFILE_IRI,
    WorkflowCrate,
    write_zip,
)


def build_crate(
    entry: WorkflowEntry,
    version: WorkflowVersion,
    *,
    base_url: str = "https://flowhub.example.org",
) -> WorkflowCrate:
    if version.main_workflow_path not in version.files:
        raise CrateBuildError(
            f"main workflow file {version.main_workflow_path!r} missing from version {version.version}"
        )

    graph: list[dict] = []
    graph.append(
        {
            "@id": METADATA_FILENAME,
            "@type": "CreativeWork",
            "about": {"@id": "./"},
            "conformsTo": [{"@id": CRATE_SPEC_IRI}, {"@id": PROFILE_IRI}],
        }
    )

    person_refs = []
    person_nodes = []
    for i, creator in enumerate(entry.creators):
        if creator.orcid and is_valid_orcid(creator.orcid):
            person_id = f"{ORCID_PREFIX}{creator.orcid}"
        else:
            person_id = f"#person-{i}"
        node = {"@id": person_id, "@type": "Person", "name": creator.name}
        if creator.affiliation:
            node["affiliation"] = creator.affiliation
        person_nodes.append(node)
        person_refs.append({"@id": person_id})

    team_refs = []
    team_nodes = []
    for team_id in sorted(entry.team_ids):
        node_id = f"#team-{team_id}"
        team_nodes.append(
            {"@id": node_id, "@type": "Organization", "identifier": team_id, "name": team_id}
        )
        team_refs.append({"@id": node_id})

    tool_refs = []
    tool_nodes = []
    for ref in entry.tool_refs:
        if ref.biotools_id:
            node_id = f"{BIOTOOLS_PREFIX}{ref.biotools_id}"
        else:
            node_id = f"#tool-{ref.display_name or ref.raw_id}"
        node = {
            "@id": node_id,
            "@type": "SoftwareApplication",
            "name": ref.display_name or ref.raw_id,
            "identifier": ref.raw_id,
        }
        tool_nodes.append(node)
        tool_refs.append({"@id": node_id})

    root: dict = {
        "@id": "./",
        "@type": "Dataset",
        "conformsTo": {"@id": PROFILE_IRI},
        "name": entry.title,
        "identifier": f"{base_url}/workflows/{entry.id}",
        "datePublished": version.created_at.isoformat(),
        "mainEntity": {"@id": version.main_workflow_path},
        "hasPart": [{"@id": path} for path in sorted(version.files)],
        "version": str(version.version),
        "creativeWorkStatus": entry.maturity.value,
        "conditionsOfAccess": json.dumps(
            policy_to_dict(entry.policy), sort_keys=True, separators=(",", ":")
        ),
    }
    if entry.description:
        root["description"] = entry.description
    if entry.license:
        root["license"] = entry.license
    if person_refs:
        root["creator"] = person_refs
    if team_refs:
        root["producer"] = team_refs
    if entry.tags:
        root["keywords"] = list(entry.tags)
    if entry.custom_citation:
        root["citation"] = entry.custom_citation
    if entry.attributions:
        root["isBasedOn"] = [
            {"@id": f"{base_url}/workflows/{target}"} for target in entry.attributions
        ]
    graph.append(root)

    workflow_class = default_registry().get(entry.workflow_class)
    language_id = f"#{entry.workflow_class}"
    main: dict = {
        "@id": version.main_workflow_path,
        "@type": ["File", "SoftwareSourceCode", "ComputationalWorkflow"],
        "name": entry.title,
        "programmingLanguage": {"@id": language_id},
    }
    if entry.edam_topics:
        main["about"] = [{"@id": f"{EDAM_PREFIX}{t}"} for t in entry.edam_topics]
    if entry.edam_operations:
        main["featureList"] = [{"@id": f"{EDAM_PREFIX}{o}"} for o in entry.edam_operations]
    if tool_refs:
        main["softwareRequirements"] = tool_refs
    if version.diagram_path and version.diagram_path in version.files:
        main["image"] = {"@id": version.diagram_path}
    if version.abstract_cwl_path and version.abstract_cwl_path in version.files:
        main["subjectOf"] = {"@id": version.abstract_cwl_path}
    graph.append(main)

    graph.append(
        {
            "@id": language_id,
            "@type": "ComputerLanguage",
            "identifier": entry.workflow_class,
            "name": workflow_class.display_name if workflow_class else entry.workflow_class,
        }
    )
    graph.extend(person_nodes)
    graph.extend(team_nodes)
    graph.extend(tool_nodes)

    for path in sorted(version.files):
        if path == version.main_workflow_path:
            continue
        node = {"@id": path, "@type": "File", "encodingFormat": version.files[path].media_type}
        if path == version.diagram_path:
            node["@type"] = ["File", "ImageObject"]
        elif path == version.abstract_cwl_path:
            node["@type"] = ["File", "SoftwareSourceCode"]
            node["description"] = "Language-neutral workflow description"
        graph.append(node)

    metadata = {"@context": CRATE_CONTEXT, "@graph": graph}
    payload = {path: f.content for path, f in version.files.items() if path != METADATA_FILENAME}
    payload[METADATA_FILENAME] = (
        json.dumps(metadata, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    ).encode("utf-8")

    archive = write_zip(payload, first=METADATA_FILENAME, created_at=version.created_at)
    return WorkflowCrate(
        archive=archive,
        metadata=metadata,
        main_entity_path=version.main_workflow_path,
        conforms_to=[CRATE_SPEC_IRI, PROFILE_IRI],
    )
