"""Workflow-language parsing: class detection, structure extraction,
bio.tools mapping, and language-neutral CWL generation."""

from .structure import PortDecl, StepDecl, WorkflowStructure
from .detect import (
    ClassRegistry,
    DEFAULT_CLASSES,
    DetectionRule,
    WorkflowClass,
    default_registry,
    detect_class,
)
from .galaxy import parse_galaxy
from .cwl import generate_abstract_cwl, parse_cwl_abstract
from .nextflow import parse_nextflow_manifest
from .snakemake import parse_snakemake
from .tools import map_tools_to_biotools

__all__ = [
    "ClassRegistry",
    "DEFAULT_CLASSES",
    "DetectionRule",
    "PortDecl",
    "StepDecl",
    "WorkflowClass",
    "WorkflowStructure",
    "default_registry",
    "detect_class",
    "generate_abstract_cwl",
    "map_tools_to_biotools",
    "parse_cwl_abstract",
    "parse_galaxy",
    "parse_nextflow_manifest",
    "parse_snakemake",
]
