"""Faceted search over access-filtered entries.

Text matching is tokenised AND-match with lowercase folding, nothing
fancier, so results are fully deterministic.  Facet counts follow the
standard convention: each facet is counted over the result set with
every OTHER facet's filter applied, but not its own.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..errors import BadQuery
from ..model import WorkflowEntry

FACETS = (
    "class",
    "tag",
    "creator",
    "team",
    "space",
    "organisation",
    "maturity",
    "edam_topic",
    "edam_operation",
    "tool",
)

SORT_KEYS = ("title", "created", "updated", "views", "downloads")

_TOKEN = re.compile(r"[a-z0-9]+")
_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def tokenize(text: str) -> set[str]:
    return set(_TOKEN.findall(text.lower()))


@dataclass
class SearchQuery:
    text: str | None = None
    filters: dict[str, set[str]] = field(default_factory=dict)
    sort_key: str = "updated"
    sort_dir: str = "desc"
    page: int = 1
    page_size: int = 20

    def validate(self) -> None:
        for facet in self.filters:
            if facet not in FACETS:
                raise BadQuery(f"unknown facet {facet!r}; valid facets: {', '.join(FACETS)}")
        if self.sort_key not in SORT_KEYS:
            raise BadQuery(f"unknown sort key {self.sort_key!r}; valid keys: {', '.join(SORT_KEYS)}")
        if self.sort_dir not in ("asc", "desc"):
            raise BadQuery("sort direction must be asc or desc")
        if not 1 <= self.page_size <= 100:
            raise BadQuery("page_size must be between 1 and 100")
        if self.page < 1:
            raise BadQuery("page must be positive")


@dataclass
class Candidate:
    entry: WorkflowEntry
    tokens: set[str]
    facets: dict[str, set[str]]  # canonical values per facet


@dataclass
class EmbargoStub:
    """Listable metadata of an embargoed entry the actor cannot view yet."""

    id: str
    title: str
    workflow_class: str
    team_ids: list[str]
    embargo_until: str | None


@dataclass
class SearchResult:
    hits: list[WorkflowEntry]
    total: int
    facet_counts: dict[str, dict[str, int]]
    page: int
    page_size: int
    embargoed: list[EmbargoStub] = field(default_factory=list)


def run_search(query: SearchQuery, candidates: list[Candidate]) -> SearchResult:
    query.validate()

    if query.text and query.text.strip():
        wanted = tokenize(query.text)
        pool = [c for c in candidates if wanted <= c.tokens]
    else:
        pool = list(candidates)

    def passes(candidate: Candidate, *, skip: str | None = None) -> bool:
        for facet, values in query.filters.items():
            if facet == skip or not values:
                continue
            have = {v.lower() for v in candidate.facets.get(facet, ())}
            if not {v.lower() for v in values} & have:
                return False
        return True

    facet_counts: dict[str, dict[str, int]] = {}
    for facet in FACETS:
        counts: dict[str, int] = {}
        for candidate in pool:
            if passes(candidate, skip=facet):
                for value in candidate.facets.get(facet, ()):
                    counts[value] = counts.get(value, 0) + 1
        facet_counts[facet] = dict(sorted(counts.items()))

    matched = [c.entry for c in pool if passes(c)]
    ordered = _sort(matched, query.sort_key, query.sort_dir)
    start = (query.page - 1) * query.page_size
    return SearchResult(
        hits=ordered[start : start + query.page_size],
        total=len(ordered),
        facet_counts=facet_counts,
        page=query.page,
        page_size=query.page_size,
    )


def _sort(entries: list[WorkflowEntry], key: str, direction: str) -> list[WorkflowEntry]:
    def value(entry: WorkflowEntry):
        if key == "title":
            return entry.title.lower()
        if key == "created":
            return entry.created_at or _EPOCH
        if key == "updated":
            return entry.updated_at or _EPOCH
        if key == "views":
            return entry.metrics.views
        return entry.metrics.downloads

    ordered = sorted(entries, key=lambda e: e.id)  # final tie-break: id ascending
    ordered.sort(key=value, reverse=(direction == "desc"))  # stable, keeps id order on ties
    return ordered
