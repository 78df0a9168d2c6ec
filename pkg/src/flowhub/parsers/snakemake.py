"""Shallow Snakemake support: rule names become steps."""

from __future__ import annotations

import re
from typing import Mapping

from ..errors import NotFoundError
from .structure import StepDecl, WorkflowStructure

_RULE = re.compile(r"(?m)^rule\s+([A-Za-z_]\w*)\s*:")

_SNAKEFILE_PATHS = ("Snakefile", "workflow/Snakefile")


def parse_snakemake(files: Mapping[str, bytes]) -> WorkflowStructure:
    for path in _SNAKEFILE_PATHS:
        if path in files:
            text = files[path].decode("utf-8", errors="replace")
            structure = WorkflowStructure()
            seen: set[str] = set()
            for name in _RULE.findall(text):
                if name not in seen:
                    seen.add(name)
                    structure.steps.append(StepDecl(id=name, label=name))
            return structure
    raise NotFoundError("no Snakefile or workflow/Snakefile in the file tree")
