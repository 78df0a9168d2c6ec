"""CITATION.cff parsing with ORCID normalisation.

Authors feed creator prefill at registration; ORCIDs are stored bare
(the ``https://orcid.org/`` prefix is stripped) and only rendered as
IRIs in JSON-LD output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml

from ..errors import ParseError, SchemaError

_ORCID_URL_PREFIXES = ("https://orcid.org/", "http://orcid.org/", "orcid.org/")


@dataclass
class CffAuthor:
    family: str
    given: str = ""
    orcid: str | None = None
    affiliation: str | None = None

    @property
    def display_name(self) -> str:
        return f"{self.given} {self.family}".strip()


@dataclass
class CitationMetadata:
    title: str | None = None
    authors: list[CffAuthor] = field(default_factory=list)
    version: str | None = None
    doi: str | None = None
    preferred_citation: str | None = None


def normalize_orcid(value: str | None) -> str | None:
    if not value:
        return None
    value = value.strip()
    for prefix in _ORCID_URL_PREFIXES:
        if value.startswith(prefix):
            return value[len(prefix):]
    return value


def parse_citation_cff(content: bytes) -> CitationMetadata:
    try:
        doc = yaml.safe_load(content.decode("utf-8", errors="replace"))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(
            f"invalid YAML: {getattr(exc, 'problem', exc)}",
            line=mark.line + 1 if mark else None,
        ) from exc
    if not isinstance(doc, dict):
        raise SchemaError("CITATION.cff is not a mapping")
    raw_authors = doc.get("authors")
    if not isinstance(raw_authors, list) or not raw_authors:
        raise SchemaError("CITATION.cff has no authors")

    authors = [_author(a) for a in raw_authors if isinstance(a, dict)]
    if not authors:
        raise SchemaError("CITATION.cff has no parseable authors")

    preferred = None
    if isinstance(doc.get("preferred-citation"), dict):
        preferred = _format_reference(doc["preferred-citation"])

    version = doc.get("version")
    return CitationMetadata(
        title=doc.get("title"),
        authors=authors,
        version=str(version) if version is not None else None,
        doi=doc.get("doi"),
        preferred_citation=preferred,
    )


def _author(entry: dict) -> CffAuthor:
    family = entry.get("family-names") or entry.get("name") or ""
    return CffAuthor(
        family=str(family),
        given=str(entry.get("given-names") or ""),
        orcid=normalize_orcid(entry.get("orcid")),
        affiliation=entry.get("affiliation"),
    )


def _format_reference(ref: dict) -> str:
    names = []
    for a in ref.get("authors", []):
        if isinstance(a, dict):
            names.append(CffAuthor(
                family=str(a.get("family-names") or a.get("name") or ""),
                given=str(a.get("given-names") or ""),
            ).display_name)
    parts = []
    if names:
        parts.append(", ".join(n for n in names if n))
    year = ref.get("year")
    title = ref.get("title")
    if title:
        parts.append(f"{title} ({year})." if year else f"{title}.")
    journal = ref.get("journal")
    if journal:
        parts.append(f"{journal}.")
    doi = ref.get("doi")
    if doi:
        parts.append(f"https://doi.org/{doi}")
    return " ".join(p for p in parts if p).strip() or None
