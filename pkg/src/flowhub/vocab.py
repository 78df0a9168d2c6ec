"""Bundled controlled vocabularies.

The data files ship with the package so they can be updated without code
changes: one id per line for flat lists, two tab-separated columns for
the Galaxy tool-name mapping.  Lines starting with ``#`` are ignored.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources
from pathlib import Path

EDAM_ID_RE = re.compile(r"^(topic|operation|format|data)_\d{4}$")


def _read_lines(name: str) -> list[str]:
    text = resources.files("flowhub.data").joinpath(name).read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


@lru_cache(maxsize=None)
def biotools_ids() -> frozenset[str]:
    return frozenset(_read_lines("biotools_ids.txt"))


@lru_cache(maxsize=None)
def edam_ids() -> frozenset[str]:
    return frozenset(_read_lines("edam_ids.txt"))


@lru_cache(maxsize=None)
def spdx_ids() -> frozenset[str]:
    return frozenset(_read_lines("spdx_ids.txt"))


@lru_cache(maxsize=None)
def galaxy_tool_mapping() -> dict[str, str]:
    mapping: dict[str, str] = {}
    for line in _read_lines("galaxy_biotools.tsv"):
        parts = line.split("\t")
        if len(parts) == 2:
            mapping[parts[0]] = parts[1]
    return mapping


def load_mapping_file(path: str | Path) -> dict[str, str]:
    """Read a two-column TSV mapping file supplied by the operator."""
    mapping: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) == 2:
            mapping[parts[0]] = parts[1]
    return mapping


def is_known_edam(edam_id: str) -> bool:
    return bool(EDAM_ID_RE.match(edam_id)) and edam_id in edam_ids()
