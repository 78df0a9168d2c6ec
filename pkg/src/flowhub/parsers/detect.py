"""Workflow class detection.

Rules run in seeded order, all content probes before all filename globs,
so a telltale byte signature beats a generic extension.  The fallback
class is always ``other``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fnmatch import fnmatchcase
from pathlib import PurePosixPath

from ..errors import SizeLimit

MAX_PARSE_BYTES = 16 * 1024 * 1024  # larger files are stored but never parsed

OTHER_CLASS_ID = "other"


@dataclass(frozen=True)
class DetectionRule:
    glob: str | None = None
    probe: str | None = None  # regex searched in the decoded text


@dataclass(frozen=True)
class WorkflowClass:
    id: str
    display_name: str
    trs_descriptor_type: str | None = None
    detection_rules: tuple[DetectionRule, ...] = ()

    @property
    def descriptor_token(self) -> str:
        """TRS descriptor type; classes without one get a PLAIN_ token."""
        return self.trs_descriptor_type or f"PLAIN_{self.id.upper()}"


DEFAULT_CLASSES: tuple[WorkflowClass, ...] = (
    WorkflowClass(
        "galaxy", "Galaxy", "GALAXY",
        (DetectionRule(probe=r'"a_galaxy_workflow"\s*:\s*"true"'), DetectionRule(glob="*.ga")),
    ),
    WorkflowClass(
        "cwl", "CWL", "CWL",
        (DetectionRule(probe=r'(?m)"cwlVersion"\s*:|^\s*cwlVersion\s*:'), DetectionRule(glob="*.cwl")),
    ),
    WorkflowClass(
        "nextflow", "Nextflow", "NFL",
        (
            DetectionRule(probe=r"\A#!.*nextflow"),
            DetectionRule(probe=r"(?m)^\s*nextflow\.enable\.dsl\s*="),
            DetectionRule(glob="main.nf"),
            DetectionRule(glob="*.nf"),
            DetectionRule(glob="nextflow.config"),
        ),
    ),
    WorkflowClass(
        "snakemake", "Snakemake", "SMK",
        (
            DetectionRule(probe=r"(?m)^rule\s+[A-Za-z_]\w*\s*:"),
            DetectionRule(glob="Snakefile"),
            DetectionRule(glob="*.smk"),
        ),
    ),
    WorkflowClass(
        "jupyter", "Jupyter", None,
        (DetectionRule(probe=r'"nbformat"\s*:\s*\d'), DetectionRule(glob="*.ipynb")),
    ),
    WorkflowClass(
        "python", "Python", None,
        (DetectionRule(probe=r"\A#!.*python"), DetectionRule(glob="*.py")),
    ),
    WorkflowClass(
        "bash", "Bash", None,
        (DetectionRule(probe=r"\A#!(?:\S*/)?(?:env\s+)?(?:ba|da|k)?sh\b"),
         DetectionRule(glob="*.sh"), DetectionRule(glob="*.bash")),
    ),
    WorkflowClass(
        "wdl", "WDL", "WDL",
        (
            DetectionRule(probe=r"(?ms)^\s*version\s+(?:1\.\d|development).*?^\s*(?:workflow|task)\s+\w+\s*\{"),
            DetectionRule(glob="*.wdl"),
        ),
    ),
    WorkflowClass("other", "Other", None, ()),
)


class ClassRegistry:
    """Seeded, runtime-extensible set of workflow classes."""

    def __init__(self, classes: tuple[WorkflowClass, ...] = DEFAULT_CLASSES):
        self._classes: list[WorkflowClass] = list(classes)

    def register(self, cls: WorkflowClass) -> None:
        if any(c.id == cls.id for c in self._classes):
            raise ValueError(f"class id {cls.id!r} already registered")
        # keep "other" last so new classes are tried before the fallback
        self._classes.insert(len(self._classes) - 1, cls)

    def get(self, class_id: str) -> WorkflowClass | None:
        for c in self._classes:
            if c.id == class_id:
                return c
        return None

    def by_display_name(self, name: str) -> WorkflowClass | None:
        folded = name.lower()
        for c in self._classes:
            if c.display_name.lower() == folded or c.id == folded:
                return c
        return None

    def all(self) -> list[WorkflowClass]:
        return list(self._classes)


_DEFAULT_REGISTRY = ClassRegistry()


def default_registry() -> ClassRegistry:
    return _DEFAULT_REGISTRY


def detect_class(
    filename: str,
    content: bytes,
    *,
    registry: ClassRegistry | None = None,
    max_size: int = MAX_PARSE_BYTES,
) -> str:
    """Classify one file; deterministic in (filename, content)."""
    if len(content) > max_size:
        raise SizeLimit(f"{filename}: {len(content)} bytes exceeds the {max_size} byte parse limit")
    registry = registry or _DEFAULT_REGISTRY
    name = PurePosixPath(filename.replace("\\", "/")).name
    text = content.decode("utf-8", errors="replace")

    for cls in registry.all():
        for rule in cls.detection_rules:
            if rule.probe is None:
                continue
            if rule.glob and not _glob_match(name, rule.glob):
                continue
            if re.search(rule.probe, text):
                return cls.id
    for cls in registry.all():
        for rule in cls.detection_rules:
            if rule.probe is None and rule.glob and _glob_match(name, rule.glob):
                return cls.id
    return OTHER_CLASS_ID


def _glob_match(name: str, pattern: str) -> bool:
    return fnmatchcase(name, pattern) or fnmatchcase(name.lower(), pattern.lower())
