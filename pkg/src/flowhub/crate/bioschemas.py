"""Structured-metadata emission for landing pages.

Produces one JSON-LD graph per entry version: a ComputationalWorkflow
node, Person nodes for creators, FormalParameter nodes for parsed ports,
and ComputationalTool references into bio.tools.
"""

from __future__ import annotations

from ..model import WorkflowEntry, WorkflowVersion, is_valid_orcid
from ..parsers import WorkflowStructure, default_registry
from .common import BIOTOOLS_PREFIX, EDAM_PREFIX, ORCID_PREFIX


def emit_bioschemas(
    entry: WorkflowEntry,
    version: WorkflowVersion,
    structure: WorkflowStructure | None = None,
    *,
    base_url: str = "https://flowhub.example.org",
) -> dict:
    canonical = f"{base_url}/workflows/{entry.id}?version={version.version}"
    graph: list[dict] = []

    person_refs = []
    for i, creator in enumerate(entry.creators):
        if creator.orcid and is_valid_orcid(creator.orcid):
            person_id = f"{ORCID_PREFIX}{creator.orcid}"
        else:
            person_id = f"#person-{i}"
        node = {"@id": person_id, "@type": "Person", "name": creator.name}
        if creator.affiliation:
            node["affiliation"] = creator.affiliation
        graph.append(node)
        person_refs.append({"@id": person_id})

    inputs, outputs = [], []
    if structure is not None:
        for port, bucket, prefix in [(p, inputs, "input") for p in structure.inputs] + [
            (p, outputs, "output") for p in structure.outputs
        ]:
            param_id = f"#{prefix}-{port.id}"
            node = {"@id": param_id, "@type": "FormalParameter", "name": port.id}
            if port.data_type:
                node["additionalType"] = port.data_type
            if port.edam_format:
                node["encodingFormat"] = f"{EDAM_PREFIX}{port.edam_format}"
            graph.append(node)
            bucket.append({"@id": param_id})

    tool_refs = []
    for ref in entry.tool_refs:
        if not ref.biotools_id:
            continue
        tool_id = f"{BIOTOOLS_PREFIX}{ref.biotools_id}"
        graph.append(
            {
                "@id": tool_id,
                "@type": ["SoftwareApplication", "ComputationalTool"],
                "name": ref.display_name or ref.biotools_id,
                "url": tool_id,
            }
        )
        tool_refs.append({"@id": tool_id})

    workflow_class = default_registry().get(entry.workflow_class)
    language_node = {
        "@id": f"#{entry.workflow_class}",
        "@type": "ComputerLanguage",
        "name": workflow_class.display_name if workflow_class else entry.workflow_class,
    }
    graph.append(language_node)

    workflow: dict = {
        "@id": canonical,
        "@type": ["SoftwareSourceCode", "ComputationalWorkflow"],
        "name": entry.title,
        "identifier": canonical,
        "url": f"{base_url}/workflows/{entry.id}",
        "programmingLanguage": {"@id": language_node["@id"]},
        "version": str(version.version),
    }
    if entry.description:
        workflow["description"] = entry.description
    if person_refs:
        workflow["creator"] = person_refs
    if entry.license:
        workflow["license"] = entry.license
    if entry.tags:
        workflow["keywords"] = ", ".join(entry.tags)
    if entry.updated_at:
        workflow["dateModified"] = entry.updated_at.isoformat()
    if entry.edam_topics:
        workflow["about"] = [{"@id": f"{EDAM_PREFIX}{t}"} for t in entry.edam_topics]
    if entry.edam_operations:
        workflow["featureList"] = [{"@id": f"{EDAM_PREFIX}{o}"} for o in entry.edam_operations]
    if inputs:
        workflow["input"] = inputs
    if outputs:
        workflow["output"] = outputs
    if tool_refs:
        workflow["softwareRequirements"] = tool_refs
    doi = entry.doi_records.get(version.version)
    if doi:
        workflow["sameAs"] = f"https://doi.org/{doi}"
    graph.insert(0, workflow)

    return {"@context": "https://schema.org/", "@graph": graph}
