"""CWL reading and writing.

``parse_cwl_abstract`` reads any CWL ``Workflow`` document (YAML or
JSON), including the stubbed language-neutral form this module emits.
``generate_abstract_cwl`` writes that form: a ``class: Workflow``
document whose step bodies are ``Operation`` stubs, usable as a
description of a workflow written in any language.
"""

from __future__ import annotations

import re

import yaml

from ..errors import NotAWorkflow, ParseError
from ..model import ToolRef
from .structure import PortDecl, StepDecl, WorkflowStructure

EDAM_IRI_RE = re.compile(r"^https?://edamontology\.org/((?:format|topic|operation|data)_\d{4})$")

_TOPIC_KEYS = ("s:about", "about", "https://schema.org/about")


def parse_cwl_abstract(content: bytes) -> WorkflowStructure:
    text = content.decode("utf-8", errors="replace")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(
            f"invalid YAML: {getattr(exc, 'problem', exc)}",
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        ) from exc
    if not isinstance(doc, dict):
        raise NotAWorkflow("document is not a CWL process")
    if doc.get("class") != "Workflow":
        raise NotAWorkflow(f"expected class Workflow, found {doc.get('class')!r}")

    structure = WorkflowStructure(
        name=_as_text(doc.get("label")),
        description=_as_text(doc.get("doc")),
        language_version=_as_text(doc.get("cwlVersion")),
    )
    structure.inputs = _parse_ports(doc.get("inputs"))
    structure.outputs = _parse_ports(doc.get("outputs"), with_source=True)

    seen_tools: set[str] = set()
    for step_id, step in _iter_named(doc.get("steps")):
        run = step.get("run") if isinstance(step, dict) else None
        tool_ref = None
        subworkflow = None
        if isinstance(run, str) and run:
            tool_ref = ToolRef(raw_id=run, display_name=run.rsplit("/", 1)[-1])
            if run not in seen_tools:
                seen_tools.add(run)
                structure.raw_tool_ids.append(run)
        elif isinstance(run, dict) and run.get("class") == "Workflow":
            subworkflow = _as_text(run.get("id")) or _as_text(run.get("label")) or step_id
        label = _as_text(step.get("label")) if isinstance(step, dict) else None
        structure.steps.append(
            StepDecl(id=step_id, label=label, tool_ref=tool_ref, subworkflow=subworkflow)
        )

    structure.edam_operations = _edam_ids(doc.get("intent"), "operation")
    for key in _TOPIC_KEYS:
        if key in doc:
            structure.edam_topics = _edam_ids(doc[key], "topic")
            break
    return structure


def generate_abstract_cwl(structure: WorkflowStructure) -> bytes:
    """Emit the structure as a stubbed CWL Workflow document.

    Round-trip guarantee: parsing the output reproduces the structure's
    port and step ids (and therefore all counts).
    """
    structure.check()  # duplicate ids -> InvalidStructure

    doc: dict = {"cwlVersion": "v1.2", "class": "Workflow"}
    if structure.name:
        doc["label"] = structure.name
    if structure.description:
        doc["doc"] = structure.description
    if structure.edam_operations:
        doc["intent"] = [f"http://edamontology.org/{op}" for op in structure.edam_operations]
    if structure.edam_topics:
        doc["$namespaces"] = {"s": "https://schema.org/"}
        doc["s:about"] = [f"http://edamontology.org/{t}" for t in structure.edam_topics]

    doc["inputs"] = {p.id: _port_decl(p) for p in structure.inputs}
    doc["outputs"] = {p.id: _port_decl(p, output=True) for p in structure.outputs}
    doc["steps"] = {
        s.id: {
            **({"label": s.label} if s.label else {}),
            "in": {},
            "out": [],
            "run": {"class": "Operation", "inputs": {}, "outputs": {}},
        }
        for s in structure.steps
    }
    return yaml.safe_dump(doc, sort_keys=False, allow_unicode=True).encode("utf-8")


# ---------------------------------------------------------------------------
# internals
# ---------------------------------------------------------------------------


def _as_text(value) -> str | None:
    if isinstance(value, str) and value.strip():
        return value
    return None


def _iter_named(node):
    """CWL allows maps keyed by id or lists of {id: ...} records."""
    if isinstance(node, dict):
        for key, value in node.items():
            yield str(key), value if isinstance(value, dict) else {"type": value}
    elif isinstance(node, list):
        for item in node:
            if isinstance(item, dict) and item.get("id") is not None:
                yield str(item["id"]).lstrip("#"), item


def _parse_ports(node, with_source: bool = False) -> list[PortDecl]:
    ports = []
    for port_id, decl in _iter_named(node):
        data_type = decl.get("type")
        if data_type is not None and not isinstance(data_type, str):
            data_type = yaml.safe_dump(data_type, default_flow_style=True).strip()
        edam_format = None
        fmt = decl.get("format")
        for candidate in fmt if isinstance(fmt, list) else [fmt]:
            if isinstance(candidate, str):
                match = EDAM_IRI_RE.match(candidate)
                if match:
                    edam_format = match.group(1)
                    break
        source_step = None
        if with_source:
            source = decl.get("outputSource")
            if isinstance(source, list) and source:
                source = source[0]
            if isinstance(source, str):
                source_step = source.lstrip("#").split("/", 1)[0]
        ports.append(
            PortDecl(
                id=port_id,
                label=_as_text(decl.get("label")),
                data_type=data_type if isinstance(data_type, str) else None,
                edam_format=edam_format,
                source_step=source_step,
            )
        )
    return ports


def _port_decl(port: PortDecl, output: bool = False) -> dict:
    decl: dict = {"type": port.data_type or "Any"}
    if port.label:
        decl["label"] = port.label
    if port.edam_format:
        decl["format"] = f"http://edamontology.org/{port.edam_format}"
    if output and port.source_step:
        decl["outputSource"] = f"{port.source_step}/{port.id}"
    return decl


def _edam_ids(node, kind: str) -> list[str]:
    values: list[str] = []
    items = node if isinstance(node, list) else [node]
    for item in items:
        if isinstance(item, dict):
            item = item.get("@id")
        if not isinstance(item, str):
            continue
        match = EDAM_IRI_RE.match(item)
        if match and match.group(1).startswith(kind):
            values.append(match.group(1))
        elif re.fullmatch(rf"{kind}_\d{{4}}", item):
            values.append(item)
    return values
