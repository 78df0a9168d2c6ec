"""Shared crate constants and the archive container type."""

from __future__ import annotations

import io
import zipfile
from dataclasses import dataclass, field
from datetime import datetime, timezone

CRATE_SPEC_IRI = "https://w3id.org/ro/crate/1.1"
CRATE_CONTEXT = "https://w3id.org/ro/crate/1.1/context"
PROFILE_IRI = "https://w3id.org/workflowhub/workflow-ro-crate/1.0"
METADATA_FILENAME = "ro-crate-metadata.json"

EDAM_PREFIX = "http://edamontology.org/"
BIOTOOLS_PREFIX = "https://bio.tools/"
ORCID_PREFIX = "https://orcid.org/"


@dataclass
class WorkflowCrate:
    archive: bytes
    metadata: dict
    main_entity_path: str
    conforms_to: list[str] = field(default_factory=list)


def write_zip(files: dict[str, bytes], *, first: str, created_at: datetime) -> bytes:
    """Deterministic zip: fixed entry order, one timestamp, fixed attrs."""
    when = created_at.astimezone(timezone.utc)
    if when.year < 1980:  # zip's epoch floor
        when = when.replace(year=1980)
    stamp = (when.year, when.month, when.day, when.hour, when.minute, when.second)
    order = [first] + sorted(p for p in files if p != first)
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w", zipfile.ZIP_DEFLATED) as archive:
        for path in order:
            info = zipfile.ZipInfo(path, date_time=stamp)
            info.compress_type = zipfile.ZIP_DEFLATED
            info.external_attr = 0o644 << 16
            archive.writestr(info, files[path])
    return buffer.getvalue()


def as_id_list(value) -> list[str]:
    """Normalise a JSON-LD reference value into a list of @id strings."""
    items = value if isinstance(value, list) else [value]
    ids = []
    for item in items:
        if isinstance(item, dict) and "@id" in item:
            ids.append(item["@id"])
        elif isinstance(item, str):
            ids.append(item)
    return ids


def as_type_list(value) -> list[str]:
    if value is None:
        return []
    return value if isinstance(value, list) else [value]
