"""Language-neutral view of a workflow: ports, steps, tool ids."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidStructure
from ..model import ToolRef


@dataclass
class PortDecl:
    id: str
    label: str | None = None
    data_type: str | None = None
    edam_format: str | None = None
    source_step: str | None = None  # step the port is wired from, when declared


@dataclass
class StepDecl:
    id: str
    label: str | None = None
    tool_ref: ToolRef | None = None
    subworkflow: str | None = None  # nested workflow reference

    def __post_init__(self):
        if self.tool_ref is not None and self.subworkflow is not None:
            raise InvalidStructure(f"step {self.id!r} has both a tool and a subworkflow")


@dataclass
class WorkflowStructure:
    name: str | None = None
    description: str | None = None
    version: str | None = None
    inputs: list[PortDecl] = field(default_factory=list)
    outputs: list[PortDecl] = field(default_factory=list)
    steps: list[StepDecl] = field(default_factory=list)
    raw_tool_ids: list[str] = field(default_factory=list)
    language_version: str | None = None
    edam_topics: list[str] = field(default_factory=list)
    edam_operations: list[str] = field(default_factory=list)

    def check(self) -> None:
        """Raise InvalidStructure on duplicate ids or dangling output sources."""
        for group, decls in (("input", self.inputs), ("output", self.outputs), ("step", self.steps)):
            seen: set[str] = set()
            for decl in decls:
                if not decl.id:
                    raise InvalidStructure(f"empty {group} id")
                if decl.id in seen:
                    raise InvalidStructure(f"duplicate {group} id {decl.id!r}")
                seen.add(decl.id)
        step_ids = {s.id for s in self.steps}
        for port in self.outputs:
            if port.source_step is not None and port.source_step not in step_ids:
                raise InvalidStructure(
                    f"output {port.id!r} sourced from unknown step {port.source_step!r}"
                )
