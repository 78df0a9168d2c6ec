"""Parser for Galaxy ``.ga`` workflow documents.

A Galaxy workflow is a JSON object with a ``steps`` map keyed by step
number.  Data-input steps double as workflow inputs, declared
``workflow_outputs`` become outputs, and every ``tool_id`` feeds the
bio.tools mapping.
"""

from __future__ import annotations

import json

from ..errors import ParseError, SchemaError
from ..model import ToolRef
from .structure import PortDecl, StepDecl, WorkflowStructure

INPUT_STEP_TYPES = {"data_input", "data_collection_input"}


def parse_galaxy(content: bytes) -> WorkflowStructure:
    try:
        doc = json.loads(content.decode("utf-8", errors="replace"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    if not isinstance(doc, dict):
        raise SchemaError("document is not a JSON object")
    steps_map = doc.get("steps")
    if not isinstance(steps_map, dict):
        raise SchemaError("missing 'steps' map")

    structure = WorkflowStructure(
        name=doc.get("name"),
        description=doc.get("annotation") or None,
        language_version=str(doc["format-version"]) if "format-version" in doc else None,
    )

    seen_tools: set[str] = set()
    for key in _ordered_step_keys(steps_map):
        raw = steps_map[key]
        if not isinstance(raw, dict):
            raise SchemaError(f"step {key!r} is not an object")
        step_type = raw.get("type", "tool")
        label = raw.get("label") or raw.get("name") or None
        tool_id = raw.get("tool_id")

        if step_type in INPUT_STEP_TYPES:
            structure.inputs.append(PortDecl(id=label or f"input_{key}", label=label))
            structure.steps.append(StepDecl(id=str(key), label=label))
        elif step_type == "subworkflow":
            sub = raw.get("subworkflow") or {}
            structure.steps.append(
                StepDecl(id=str(key), label=label, subworkflow=sub.get("name") or f"subworkflow_{key}")
            )
        else:
            ref = None
            if tool_id:
                ref = ToolRef(raw_id=tool_id, display_name=raw.get("name") or tool_id)
                if tool_id not in seen_tools:
                    seen_tools.add(tool_id)
                    structure.raw_tool_ids.append(tool_id)
            structure.steps.append(StepDecl(id=str(key), label=label, tool_ref=ref))

        for out in raw.get("workflow_outputs") or []:
            if not isinstance(out, dict):
                continue
            out_id = out.get("label") or out.get("output_name")
            if out_id:
                structure.outputs.append(
                    PortDecl(id=str(out_id), label=out.get("label"), source_step=str(key))
                )

    return structure


def _ordered_step_keys(steps_map: dict) -> list:
    def sort_key(k):
        try:
            return (0, int(k), str(k))
        except (TypeError, ValueError):
            return (1, 0, str(k))

    return sorted(steps_map, key=sort_key)
