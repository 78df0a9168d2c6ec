"""Mapping of raw tool identifiers to bio.tools entries.

An exact hit in the mapping table wins; otherwise a deterministic
heuristic applies: strip Galaxy toolshed prefixes
(``toolshed.../repos/<owner>/<repo>/<tool>/<version>`` keeps ``<tool>``),
fold to lowercase, and accept the result only when it appears in the
bundled bio.tools id list.  The table is also consulted for the stripped
name, so toolshed-qualified ids benefit from table rows keyed on the
short tool name.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from ..model import ToolRef
from .. import vocab


def map_tools_to_biotools(
    raw_ids: Iterable[str],
    *,
    mapping: Mapping[str, str] | None = None,
    known_ids: frozenset[str] | set[str] | None = None,
) -> list[ToolRef]:
    """Resolve each raw id to a ToolRef; idempotent and order-preserving."""
    table = vocab.galaxy_tool_mapping() if mapping is None else mapping
    ids = vocab.biotools_ids() if known_ids is None else known_ids

    refs: list[ToolRef] = []
    for raw in raw_ids:
        short = strip_toolshed_prefix(raw)
        if raw in table:
            biotools = table[raw]
        elif short in table:
            biotools = table[short]
        elif short.lower() in table:
            biotools = table[short.lower()]
        else:
            candidate = short.lower()
            biotools = candidate if candidate in ids else None
        refs.append(ToolRef(raw_id=raw, biotools_id=biotools, display_name=short))
    return refs


def strip_toolshed_prefix(raw_id: str) -> str:
    """``toolshed.g2.bx.psu.edu/repos/iuc/bwa/bwa/0.7.17`` -> ``bwa``."""
    if "/repos/" not in raw_id:
        return raw_id
    host = raw_id.split("/repos/", 1)[0]
    if not host.startswith("toolshed."):
        return raw_id
    tail = raw_id.split("/repos/", 1)[1].split("/")
    if len(tail) >= 3:
        return tail[2]
    return tail[-1]
