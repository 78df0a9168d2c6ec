"""Crate import and conformance checking."""

from __future__ import annotations

import json
import re
import zipfile
from dataclasses import dataclass, field
from io import BytesIO

from ..errors import InvalidCrate, NotACrate, SizeLimit
from ..model import AccessPolicy, Creator, Maturity, ToolRef
from ..serde import policy_from_dict
from .common import (
    BIOTOOLS_PREFIX,
    EDAM_PREFIX,
    METADATA_FILENAME,
    ORCID_PREFIX,
    as_id_list,
    as_type_list,
)

MAX_DECOMPRESSED_BYTES = 512 * 1024 * 1024  # zip bomb guard

MAIN_ENTITY_TYPES = {"File", "SoftwareSourceCode", "ComputationalWorkflow"}

_ENTRY_IRI = re.compile(r"/workflows/([^/?#]+)$")


@dataclass
class CrateContents:
    title: str | None
    description: str
    license: str | None
    creators: list[Creator]
    workflow_class: str | None
    edam_topics: list[str]
    edam_operations: list[str]
    tags: list[str]
    maturity: Maturity | None
    custom_citation: str | None
    policy: AccessPolicy | None
    team_ids: list[str]
    tool_refs: list[ToolRef]
    attribution_ids: list[str]  # local entry ids recovered from isBasedOn IRIs
    attribution_iris: list[str]  # every isBasedOn reference, verbatim
    files: dict[str, bytes]
    media_types: dict[str, str]
    main_workflow_path: str
    diagram_path: str | None
    abstract_cwl_path: str | None
    version_label: str | None
    conforms_to: list[str]
    extras: list[dict] = field(default_factory=list)  # unknown entities, verbatim


def read_crate(archive: bytes, *, max_bytes: int = MAX_DECOMPRESSED_BYTES) -> CrateContents:
    files = _extract(archive, max_bytes)
    if METADATA_FILENAME not in files:
        raise NotACrate(f"archive has no {METADATA_FILENAME} at its root")
    try:
        metadata = json.loads(files[METADATA_FILENAME].decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InvalidCrate(f"metadata document is not valid JSON: {exc}") from exc
    if not isinstance(metadata, dict) or not isinstance(metadata.get("@graph"), list):
        raise InvalidCrate("metadata document has no @graph")

    graph = [e for e in metadata["@graph"] if isinstance(e, dict)]
    by_id = {e.get("@id"): e for e in graph}

    descriptor = by_id.get(METADATA_FILENAME)
    root_id = "./"
    conforms_to: list[str] = []
    if descriptor:
        about = as_id_list(descriptor.get("about", "./"))
        root_id = about[0] if about else "./"
        conforms_to.extend(as_id_list(descriptor.get("conformsTo", [])))
    root = by_id.get(root_id)
    if root is None:
        raise InvalidCrate("root dataset entity is missing")
    conforms_to.extend(i for i in as_id_list(root.get("conformsTo", [])) if i not in conforms_to)

    main_ids = as_id_list(root.get("mainEntity", []))
    if not main_ids:
        raise InvalidCrate("root dataset has no mainEntity")
    main_path = main_ids[0]
    main = by_id.get(main_path)
    if main is None:
        raise InvalidCrate(f"mainEntity {main_path!r} is not described in the crate")
    if main_path not in files:
        raise InvalidCrate(f"mainEntity {main_path!r} is not present in the archive")

    consumed = {METADATA_FILENAME, root_id, main_path}

    creators = []
    for ref in as_id_list(root.get("creator", [])):
        node = by_id.get(ref, {})
        consumed.add(ref)
        orcid = ref[len(ORCID_PREFIX):] if ref.startswith(ORCID_PREFIX) else None
        creators.append(
            Creator(
                name=node.get("name", ref),
                orcid=orcid,
                affiliation=node.get("affiliation"),
            )
        )

    team_ids = []
    for ref in as_id_list(root.get("producer", [])):
        node = by_id.get(ref, {})
        consumed.add(ref)
        team_ids.append(node.get("identifier") or ref.lstrip("#").removeprefix("team-"))

    workflow_class = None
    for ref in as_id_list(main.get("programmingLanguage", [])):
        node = by_id.get(ref, {})
        consumed.add(ref)
        workflow_class = node.get("identifier") or node.get("name", "").lower() or ref.lstrip("#")
        break

    tool_refs = []
    for ref in as_id_list(main.get("softwareRequirements", [])):
        node = by_id.get(ref, {})
        consumed.add(ref)
        biotools = None
        if ref.startswith(BIOTOOLS_PREFIX):
            biotools = ref[len(BIOTOOLS_PREFIX):]
        tool_refs.append(
            ToolRef(
                raw_id=node.get("identifier") or node.get("name", ref),
                biotools_id=biotools,
                display_name=node.get("name", ""),
            )
        )

    edam_topics = _edam_suffixes(main.get("about", []), "topic")
    edam_operations = _edam_suffixes(main.get("featureList", []), "operation")

    attribution_iris = as_id_list(root.get("isBasedOn", []))
    attribution_ids = []
    for iri in attribution_iris:
        match = _ENTRY_IRI.search(iri)
        if match:
            attribution_ids.append(match.group(1))

    maturity = None
    if root.get("creativeWorkStatus") in {m.value for m in Maturity}:
        maturity = Maturity(root["creativeWorkStatus"])

    policy = None
    conditions = root.get("conditionsOfAccess")
    if isinstance(conditions, str):
        try:
            policy = policy_from_dict(json.loads(conditions))
        except (json.JSONDecodeError, KeyError, ValueError):
            policy = None  # free-text access statement from another registry

    diagram_path = None
    abstract_cwl_path = None
    image_refs = as_id_list(main.get("image", []))
    if image_refs and image_refs[0] in files:
        diagram_path = image_refs[0]
    subject_refs = as_id_list(main.get("subjectOf", []))
    if subject_refs and subject_refs[0] in files:
        abstract_cwl_path = subject_refs[0]

    media_types = {}
    for part in as_id_list(root.get("hasPart", [])):
        node = by_id.get(part)
        if node is not None:
            consumed.add(part)
            if isinstance(node.get("encodingFormat"), str):
                media_types[part] = node["encodingFormat"]

    keywords = root.get("keywords", [])
    if isinstance(keywords, str):
        keywords = [k.strip() for k in keywords.split(",") if k.strip()]

    extras = [e for e in graph if e.get("@id") not in consumed]
    content_files = {p: data for p, data in files.items() if p != METADATA_FILENAME}

    return CrateContents(
        title=root.get("name"),
        description=root.get("description", ""),
        license=root.get("license") if isinstance(root.get("license"), str) else None,
        creators=creators,
        workflow_class=workflow_class,
        edam_topics=edam_topics,
        edam_operations=edam_operations,
        tags=list(keywords),
        maturity=maturity,
        custom_citation=root.get("citation") if isinstance(root.get("citation"), str) else None,
        policy=policy,
        team_ids=team_ids,
        tool_refs=tool_refs,
        attribution_ids=attribution_ids,
        attribution_iris=attribution_iris,
        files=content_files,
        media_types=media_types,
        main_workflow_path=main_path,
        diagram_path=diagram_path,
        abstract_cwl_path=abstract_cwl_path,
        version_label=root.get("version") if isinstance(root.get("version"), str) else None,
        conforms_to=conforms_to,
        extras=extras,
    )


# ---------------------------------------------------------------------------
# Conformance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CrateFinding:
    code: str
    severity: str  # "error" | "warning"
    message: str
    path: str | None = None


@dataclass
class ConformanceReport:
    level: str  # valid | warnings | invalid
    findings: list[CrateFinding] = field(default_factory=list)

    def codes(self) -> set[str]:
        return {f.code for f in self.findings}


def validate_crate(archive: bytes, *, max_bytes: int = MAX_DECOMPRESSED_BYTES) -> ConformanceReport:
    """Check profile conformance; every outcome is a finding, never a raise."""
    findings: list[CrateFinding] = []
    err = lambda code, msg, path=None: findings.append(CrateFinding(code, "error", msg, path))
    warn = lambda code, msg, path=None: findings.append(CrateFinding(code, "warning", msg, path))

    try:
        files = _extract(archive, max_bytes)
    except (NotACrate, SizeLimit) as exc:
        err(exc.code, exc.message)
        return ConformanceReport("invalid", findings)

    if METADATA_FILENAME not in files:
        err("not_a_crate", f"no {METADATA_FILENAME} at the archive root")
        return ConformanceReport("invalid", findings)
    try:
        metadata = json.loads(files[METADATA_FILENAME].decode("utf-8"))
        graph = [e for e in metadata.get("@graph", []) if isinstance(e, dict)]
    except (json.JSONDecodeError, UnicodeDecodeError, AttributeError):
        err("invalid_crate", "metadata document is not parseable JSON-LD")
        return ConformanceReport("invalid", findings)

    by_id = {e.get("@id"): e for e in graph}
    descriptor = by_id.get(METADATA_FILENAME)
    if descriptor is None:
        err("missing_descriptor", "no metadata descriptor entity")
    root_id = "./"
    if descriptor:
        about = as_id_list(descriptor.get("about", "./"))
        root_id = about[0] if about else "./"
    root = by_id.get(root_id)
    if root is None:
        err("missing_root_dataset", f"no root dataset entity {root_id!r}")
        return ConformanceReport("invalid", findings)

    main_ids = as_id_list(root.get("mainEntity", []))
    main = by_id.get(main_ids[0]) if main_ids else None
    if main is None:
        err("main_entity_missing", "root dataset has no resolvable mainEntity")
    else:
        types = set(as_type_list(main.get("@type")))
        if not MAIN_ENTITY_TYPES <= types:
            err(
                "main_entity_untyped",
                f"mainEntity must be typed {sorted(MAIN_ENTITY_TYPES)}, found {sorted(types)}",
                main_ids[0],
            )
        if not main.get("programmingLanguage"):
            warn("missing_programming_language", "mainEntity declares no programmingLanguage")

    if not root.get("license"):
        warn("missing_license", "root dataset has no license")

    described = set()
    for entity in graph:
        entity_id = entity.get("@id")
        types = set(as_type_list(entity.get("@type")))
        if entity_id and "File" in types:
            described.add(entity_id)
            if entity_id not in files and not entity_id.startswith(("http://", "https://")):
                err("file_missing", f"described file {entity_id!r} is absent from the archive", entity_id)
    for path in files:
        if path != METADATA_FILENAME and path not in described:
            warn("orphan_file", f"archive file {path!r} is not described in the metadata", path)

    if any(f.severity == "error" for f in findings):
        level = "invalid"
    elif findings:
        level = "warnings"
    else:
        level = "valid"
    return ConformanceReport(level, findings)


# ---------------------------------------------------------------------------
# internals
# ---------------------------------------------------------------------------


def _extract(archive: bytes, max_bytes: int) -> dict[str, bytes]:
    try:
        zf = zipfile.ZipFile(BytesIO(archive))
    except zipfile.BadZipFile as exc:
        raise NotACrate("input is not a zip archive") from exc
    with zf:
        infos = [i for i in zf.infolist() if not i.is_dir()]
        total = sum(i.file_size for i in infos)
        if total > max_bytes:
            raise SizeLimit(f"decompressed size {total} exceeds the {max_bytes} byte cap")
        names = [i.filename for i in infos]
        prefix = ""
        if METADATA_FILENAME not in names:
            tops = {n.split("/", 1)[0] for n in names}
            if len(tops) == 1 and f"{next(iter(tops))}/{METADATA_FILENAME}" in names:
                prefix = next(iter(tops)) + "/"  # single wrapping directory: unwrap
        files = {}
        for info in infos:
            name = info.filename
            if prefix and name.startswith(prefix):
                name = name[len(prefix):]
            if name:
                files[name] = zf.read(info)
        return files


def _edam_suffixes(value, kind: str) -> list[str]:
    ids = []
    for iri in as_id_list(value):
        if iri.startswith(EDAM_PREFIX):
            suffix = iri[len(EDAM_PREFIX):]
            if suffix.startswith(kind + "_"):
                ids.append(suffix)
    return ids
