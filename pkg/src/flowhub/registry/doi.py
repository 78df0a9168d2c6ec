"""DOI minting: DataCite-shaped payloads behind a pluggable client.

The default client records payloads instead of talking to the network;
a production deployment swaps in a real client with the same ``mint``
signature.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Protocol

from ..errors import MintFailed
from ..model import WorkflowEntry, WorkflowVersion


@dataclass
class DoiRecord:
    doi: str
    entry_id: str
    version: int
    datacite_payload: dict
    minted_at: datetime


class DoiClient(Protocol):
    def mint(self, doi: str, payload: dict) -> None: ...


class RecordingDoiClient:
    """Mock client: keeps a transcript; can be told to fail for tests."""

    def __init__(self):
        self.minted: list[tuple[str, dict]] = []
        self.fail_next = False

    def mint(self, doi: str, payload: dict) -> None:
        if self.fail_next:
            self.fail_next = False
            raise MintFailed("mint client refused the request")
        self.minted.append((doi, payload))


def format_doi(prefix: str, entry_id: str, version: int) -> str:
    return f"{prefix}/wfhub.{entry_id}.{version}"


def build_datacite_payload(
    entry: WorkflowEntry,
    version: WorkflowVersion,
    doi: str,
    *,
    publisher: str,
    base_url: str,
    year: int,
) -> dict:
    creators = [
        {
            "name": c.name,
            **(
                {
                    "nameIdentifiers": [
                        {
                            "nameIdentifier": f"https://orcid.org/{c.orcid}",
                            "nameIdentifierScheme": "ORCID",
                        }
                    ]
                }
                if c.orcid
                else {}
            ),
        }
        for c in entry.creators
    ] or [{"name": publisher}]
    related = [
        {
            "relatedIdentifier": f"{base_url}/workflows/{target}",
            "relatedIdentifierType": "URL",
            "relationType": "IsDerivedFrom",
        }
        for target in entry.attributions
    ]
    attributes = {
        "doi": doi,
        "creators": creators,
        "titles": [{"title": entry.title}],
        "publisher": publisher,
        "publicationYear": year,
        "types": {"resourceTypeGeneral": "Workflow"},
        "url": f"{base_url}/workflows/{entry.id}?version={version.version}",
        "version": str(version.version),
    }
    if related:
        attributes["relatedIdentifiers"] = related
    if entry.license:
        attributes["rightsList"] = [{"rights": entry.license}]
    return {"data": {"type": "dois", "attributes": attributes}}
