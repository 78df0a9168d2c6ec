"""Workflow-RO-Crate packaging: build, read, validate, plus CITATION.cff
parsing and structured-metadata (JSON-LD) emission."""

from .common import CRATE_SPEC_IRI, PROFILE_IRI, WorkflowCrate
from .build import build_crate
from .read import ConformanceReport, CrateContents, read_crate, validate_crate
from .citation import CitationMetadata, CffAuthor, parse_citation_cff
from .bioschemas import emit_bioschemas

__all__ = [
    "CRATE_SPEC_IRI",
    "CffAuthor",
    "CitationMetadata",
    "ConformanceReport",
    "CrateContents",
    "PROFILE_IRI",
    "WorkflowCrate",
    "build_crate",
    "emit_bioschemas",
    "parse_citation_cff",
    "read_crate",
    "validate_crate",
]
