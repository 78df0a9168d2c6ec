"""Shallow Nextflow support: read the ``manifest { }`` block.

Process-level parsing is deliberately out of scope; the manifest gives
us the pipeline name, description, version and the engine version pin,
which is all the registry displays.
"""

from __future__ import annotations

import re
from typing import Mapping

from ..errors import NotFoundError
from .structure import WorkflowStructure

_MANIFEST_BLOCK = re.compile(r"manifest\s*\{(?P<body>[^{}]*)\}", re.DOTALL)
_BLOCK_KEY = re.compile(r"(?m)^\s*(?P<key>\w+)\s*=\s*(?P<value>.+?)\s*$")
_DOTTED_KEY = re.compile(r"(?m)^\s*manifest\.(?P<key>\w+)\s*=\s*(?P<value>.+?)\s*$")

_FILENAMES = ("nextflow.config", "main.nf")


def parse_nextflow_manifest(files: Mapping[str, bytes]) -> WorkflowStructure:
    texts = []
    for name in _FILENAMES:
        for path in sorted(files, key=lambda p: (p.count("/"), p)):
            if path == name or path.endswith("/" + name):
                texts.append(files[path].decode("utf-8", errors="replace"))
                break
    if not texts:
        raise NotFoundError("no nextflow.config or main.nf in the file tree")

    manifest: dict[str, str] = {}
    for text in texts:
        block = _MANIFEST_BLOCK.search(text)
        if block:
            for m in _BLOCK_KEY.finditer(block.group("body")):
                manifest.setdefault(m.group("key"), _unquote(m.group("value")))
        for m in _DOTTED_KEY.finditer(text):
            manifest.setdefault(m.group("key"), _unquote(m.group("value")))

    return WorkflowStructure(
        name=manifest.get("name"),
        description=manifest.get("description"),
        version=manifest.get("version"),
        language_version=manifest.get("nextflowVersion"),
    )


def _unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in ("'", '"'):
        return value[1:-1]
    return value
