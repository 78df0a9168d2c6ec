"""The registry itself: registration pipelines, versioning, metadata
editing, DOIs, collections, subscriptions, metrics, search, and the
entity CRUD that keeps the collaboration hierarchy honest.

Writes are serialised per entity id; reads see committed state only.
A failed registration pipeline leaves no trace: every fallible step runs
before the first store write.
"""

from __future__ import annotations

import hashlib
import mimetypes
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Callable, Iterable

from .. import gitio
from ..crate import (
    CrateContents,
    build_crate,
    emit_bioschemas,
    parse_citation_cff,
    read_crate,
)
from ..errors import (
    AccessDenied,
    AttributionCycle,
    AuthRequired,
    Conflict,
    DuplicateItem,
    FrozenVersion,
    InvalidInput,
    IntegrityError,
    NotFoundError,
    ValidationFailed,
    VisibilityRequired,
)
from ..model import (
    AccessDecision,
    AccessPolicy,
    Asset,
    Collection,
    CollectionItem,
    CrateSource,
    Creator,
    CreditGraph,
    FileEntry,
    GitSource,
    Grant,
    ItemKind,
    Maturity,
    Membership,
    Metrics,
    Organisation,
    Right,
    Role,
    Space,
    SubjectKind,
    Team,
    TeamMember,
    ToolRef,
    UploadSource,
    User,
    Visibility,
    WorkflowEntry,
    WorkflowVersion,
    check_access,
    is_valid_orcid,
    resolve_credit,
    validate_entry,
    DEFAULT_SPACE_NAME,
)
from ..parsers import (
    ClassRegistry,
    WorkflowStructure,
    default_registry,
    detect_class,
    generate_abstract_cwl,
    map_tools_to_biotools,
    parse_cwl_abstract,
    parse_galaxy,
    parse_nextflow_manifest,
    parse_snakemake,
)
from ..parsers.detect import MAX_PARSE_BYTES, OTHER_CLASS_ID
from .. import serde
from ..errors import FlowHubError
from .config import RegistryConfig
from .doi import DoiRecord, RecordingDoiClient, build_datacite_payload, format_doi
from .search import Candidate, EmbargoStub, SearchQuery, SearchResult, run_search, tokenize
from .store import Store

WIZARD_FIELDS = frozenset(
    {
        "title",
        "description",
        "creators",
        "maturity",
        "license",
        "tags",
        "edam_topics",
        "edam_operations",
        "tool_refs",
        "attributions",
        "custom_citation",
        "team_ids",
        "policy",
        "other_contributors",
    }
)

ABSTRACT_CWL_FILENAME = "abstract-cwl.cwl"

_MEDIA_OVERRIDES = {
    ".ga": "application/json",
    ".cwl": "application/x-yaml",
    ".nf": "text/x-nextflow",
    ".smk": "text/x-snakemake",
    ".wdl": "text/x-wdl",
    ".ipynb": "application/x-ipynb+json",
    ".md": "text/markdown",
    ".cff": "application/x-yaml",
}


def guess_media_type(path: str) -> str:
    for suffix, media in _MEDIA_OVERRIDES.items():
        if path.lower().endswith(suffix):
            return media
    guessed, _ = mimetypes.guess_type(path)
    return guessed or "application/octet-stream"


# ---------------------------------------------------------------------------
# Registration sources
# ---------------------------------------------------------------------------


@dataclass
class UploadSpec:
    files: dict[str, bytes]
    main_path: str
    media_types: dict[str, str] = field(default_factory=dict)


@dataclass
class CrateSpec:
    archive: bytes


@dataclass
class GitSpec:
    remote: str
    ref: str | None = None


@dataclass
class AcquiredContent:
    files: dict[str, FileEntry]
    main_path: str
    source: UploadSource | CrateSource | GitSource
    prefill: dict = field(default_factory=dict)
    diagram_path: str | None = None
    abstract_cwl_path: str | None = None
    crate: CrateContents | None = None


@dataclass
class RegistrationPreview:
    prefill: dict
    structure: WorkflowStructure | None
    report_errors: list
    report_warnings: list
    detected_class: str
    main_path: str


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


class Registry:
    def __init__(
        self,
        store: Store | None = None,
        config: RegistryConfig | None = None,
        *,
        clock: Callable[[], datetime] | None = None,
        doi_client=None,
        class_registry: ClassRegistry | None = None,
    ):
        self.store = store or Store()
        self.config = config or RegistryConfig()
        self.clock = clock or (lambda: datetime.now(timezone.utc))
        self.doi_client = doi_client or RecordingDoiClient()
        self.classes = class_registry or default_registry()
        self._tokens: dict[str, set[str]] = {}
        self._index_lock = threading.Lock()
        self._ensure_default_space()
        self._rebuild_index()

    # -- bootstrap ------------------------------------------------------------

    def _ensure_default_space(self) -> None:
        for space_id in self.store.ids("space"):
            if self.store.require("space", space_id).get("is_default"):
                return
        space = Space(
            id=self.store.next_id("space", "s"),
            name=DEFAULT_SPACE_NAME,
            description="Default space for teams that do not need their own.",
            admin_user_ids=set(),
            is_default=True,
        )
        self.store.put("space", space.id, serde.space_to_dict(space))

    def _rebuild_index(self) -> None:
        with self._index_lock:
            self._tokens = {}
            for entry_id in self.store.ids("entry"):
                entry = self._entry(entry_id)
                self._tokens[entry_id] = self._entry_tokens(entry)

    @staticmethod
    def _entry_tokens(entry: WorkflowEntry) -> set[str]:
        parts = [entry.title, entry.description, " ".join(entry.tags)]
        parts += [c.name for c in entry.creators]
        return tokenize(" ".join(parts))

    # -- entity lookups ---------------------------------------------------------

    def _entry(self, entry_id: str) -> WorkflowEntry:
        return serde.entry_from_dict(self.store.require("entry", entry_id), self.store.get_blob)

    def get_entry(self, entry_id: str) -> WorkflowEntry:
        return self._entry(entry_id)

    def all_entries(self) -> list[WorkflowEntry]:
        return [self._entry(i) for i in self.store.ids("entry")]

    def get_user(self, user_id: str) -> User:
        return serde.user_from_dict(self.store.require("user", user_id))

    def get_team(self, team_id: str) -> Team:
        return serde.team_from_dict(self.store.require("team", team_id))

    def get_space(self, space_id: str) -> Space:
        return serde.space_from_dict(self.store.require("space", space_id))

    def get_organisation(self, org_id: str) -> Organisation:
        return serde.organisation_from_dict(self.store.require("organisation", org_id))

    def get_collection(self, collection_id: str) -> Collection:
        return serde.collection_from_dict(self.store.require("collection", collection_id))

    def teams(self) -> dict[str, Team]:
        return {i: self.get_team(i) for i in self.store.ids("team")}

    def spaces(self) -> dict[str, Space]:
        return {i: self.get_space(i) for i in self.store.ids("space")}

    def users(self) -> dict[str, User]:
        return {i: self.get_user(i) for i in self.store.ids("user")}

    def organisations(self) -> dict[str, Organisation]:
        return {i: self.get_organisation(i) for i in self.store.ids("organisation")}

    def default_space(self) -> Space:
        for space_id in self.store.ids("space"):
            space = self.get_space(space_id)
            if space.is_default:
                return space
        raise IntegrityError("no default space exists")

    # -- access -----------------------------------------------------------------

    def _fresh(self, actor: User | None) -> User | None:
        """Re-read the actor so membership changes made after the caller
        obtained its User object are honoured."""
        if actor is None:
            return None
        doc = self.store.get("user", actor.id)
        return serde.user_from_dict(doc) if doc else actor

    def check_access(self, actor: User | None, entry, right: Right) -> AccessDecision:
        return check_access(
            self._fresh(actor), entry, right, teams=self.teams(), spaces=self.spaces(), now=self.clock()
        )

    def entry_for(self, actor: User | None, entry_id: str, right: Right) -> WorkflowEntry:
        entry = self._entry(entry_id)
        decision = self.check_access(actor, entry, right)
        if not decision.allow:
            raise AccessDenied(f"{right.value} on {entry_id}: {decision.reason}")
        return entry

    # -- authentication -----------------------------------------------------------

    def create_user(
        self,
        display_name: str,
        *,
        orcid: str | None = None,
        organisation_ids: Iterable[str] = (),
        expertise_tags: Iterable[str] = (),
        site_admin: bool = False,
    ) -> tuple[User, str]:
        if not display_name.strip():
            raise InvalidInput("display_name must not be empty")
        if orcid and not is_valid_orcid(orcid):
            raise InvalidInput(f"{orcid!r} is not a valid ORCID id")
        org_ids = set(organisation_ids)
        for org_id in org_ids:
            self.store.require("organisation", org_id)
        api_key = secrets.token_hex(16)
        user = User(
            id=self.store.next_id("user", "u"),
            display_name=display_name,
            orcid=orcid,
            organisation_ids=org_ids,
            expertise_tags=list(expertise_tags),
            site_admin=site_admin,
            api_key_hash=hashlib.sha256(api_key.encode()).hexdigest(),
        )
        self.store.put("user", user.id, serde.user_to_dict(user))
        return user, api_key

    def authenticate(self, user_id: str, api_key: str) -> User | None:
        doc = self.store.get("user", user_id)
        if doc is None or not doc.get("api_key_hash"):
            return None
        if hashlib.sha256(api_key.encode()).hexdigest() != doc["api_key_hash"]:
            return None
        return serde.user_from_dict(doc)

    def issue_token(self, user_id: str, api_key: str) -> tuple[str, datetime]:
        user = self.authenticate(user_id, api_key)
        if user is None:
            raise AuthRequired("unknown user or wrong API key")
        return self._mint_token(user.id)

    def issue_token_for(self, user_id: str) -> tuple[str, datetime]:
        """Operator path (CLI): mint a token without the API key."""
        self.store.require("user", user_id)
        return self._mint_token(user_id)

    def _mint_token(self, user_id: str) -> tuple[str, datetime]:
        token = secrets.token_hex(24)
        expires = self.clock() + timedelta(hours=self.config.token_ttl_hours)
        digest = hashlib.sha256(token.encode()).hexdigest()
        self.store.put("token", digest, {"user_id": user_id, "expires_at": expires.isoformat()})
        return token, expires

    def resolve_token(self, token: str) -> User | None:
        digest = hashlib.sha256(token.encode()).hexdigest()
        doc = self.store.get("token", digest)
        if doc is None:
            return None
        if datetime.fromisoformat(doc["expires_at"]) < self.clock():
            return None
        user_doc = self.store.get("user", doc["user_id"])
        return serde.user_from_dict(user_doc) if user_doc else None

    # -- hierarchy management -------------------------------------------------------

    def create_organisation(self, name: str, country: str | None = None) -> Organisation:
        if not name.strip():
            raise InvalidInput("organisation name must not be empty")
        if country is not None and (len(country) != 2 or not country.isalpha()):
            raise InvalidInput("country must be an ISO 3166 alpha-2 code")
        folded = name.strip().lower()
        for org_id in self.store.ids("organisation"):
            if self.get_organisation(org_id).name.strip().lower() == folded:
                raise Conflict(f"organisation named {name!r} already exists")
        org = Organisation(self.store.next_id("organisation", "o"), name.strip(), country)
        self.store.put("organisation", org.id, serde.organisation_to_dict(org))
        return org

    def create_space(self, actor: User, name: str, description: str = "") -> Space:
        self._require_actor(actor)
        if not actor.site_admin:
            raise AccessDenied("spaces are created upon request by registry admins")
        if not name.strip():
            raise InvalidInput("space name must not be empty")
        space = Space(
            id=self.store.next_id("space", "s"),
            name=name.strip(),
            description=description,
            admin_user_ids={actor.id},
        )
        self.store.put("space", space.id, serde.space_to_dict(space))
        return space

    def delete_space(self, actor: User, space_id: str) -> None:
        self._require_actor(actor)
        space = self.get_space(space_id)
        if space.is_default:
            raise AccessDenied("the default space cannot be deleted")
        if not (actor.site_admin or actor.id in space.admin_user_ids):
            raise AccessDenied("only space admins may delete a space")
        if any(team.space_id == space_id for team in self.teams().values()):
            raise Conflict("space still contains teams; move or delete them first")
        self.store.delete("space", space_id)

    def create_team(
        self,
        actor: User,
        name: str,
        space_id: str | None,
        *,
        description: str = "",
        default_license: str | None = None,
        actor_organisation_ids: Iterable[str] = (),
    ) -> Team:
        self._require_actor(actor)
        if not name.strip():
            raise InvalidInput("team name must not be empty")
        if not space_id:
            raise InvalidInput("a team must belong to a space")
        self.store.require("space", space_id)
        team_id = self.store.next_id("team", "t")
        policy = AccessPolicy(
            visibility=Visibility.PRIVATE,
            grants=[Grant(SubjectKind.TEAM, team_id, Right.MANAGE)],
        )
        team = Team(
            id=team_id,
            name=name.strip(),
            space_id=space_id,
            description=description,
            members=[TeamMember(actor.id, Role.ADMIN)],
            default_policy=policy,
            default_license=default_license,
        )
        self.store.put("team", team.id, serde.team_to_dict(team))
        self._add_membership(actor.id, team_id, Role.ADMIN, set(actor_organisation_ids))
        return team

    def add_team_member(
        self,
        actor: User,
        team_id: str,
        user_id: str,
        *,
        role: Role = Role.MEMBER,
        organisation_ids: Iterable[str] = (),
    ) -> Team:
        self._require_actor(actor)
        team = self.get_team(team_id)
        if not (actor.site_admin or actor.id in team.admin_ids()):
            raise AccessDenied("only team admins may add members")
        user = self.get_user(user_id)
        org_ids = set(organisation_ids)
        if not org_ids <= user.organisation_ids:
            raise InvalidInput("per-team affiliations must be a subset of the user's organisations")
        if user_id not in team.member_ids():
            team.members.append(TeamMember(user_id, role))
            self.store.put("team", team.id, serde.team_to_dict(team))
        self._add_membership(user_id, team_id, role, org_ids)
        return self.get_team(team_id)

    def _add_membership(self, user_id: str, team_id: str, role: Role, org_ids: set[str]) -> None:
        with self.store.entity_lock("user", user_id):
            user = self.get_user(user_id)
            existing = user.membership_for(team_id)
            if existing is None:
                user.memberships.append(Membership(team_id, role, org_ids))
            else:
                existing.role = role
                existing.organisation_ids |= org_ids
            self.store.put("user", user.id, serde.user_to_dict(user))

    def delete_team(self, actor: User, team_id: str) -> None:
        self._require_actor(actor)
        team = self.get_team(team_id)
        if not (actor.site_admin or actor.id in team.admin_ids()):
            raise AccessDenied("only team admins may delete a team")
        owners = [e for e in self.all_entries() if team_id in e.team_ids]
        if owners:
            raise Conflict(
                f"team {team_id} still owns {len(owners)} entries; re-home them before deleting"
            )
        for user_id in team.member_ids():
            with self.store.entity_lock("user", user_id):
                user = self.get_user(user_id)
                user.memberships = [m for m in user.memberships if m.team_id != team_id]
                self.store.put("user", user.id, serde.user_to_dict(user))
        self.store.delete("team", team_id)

    def create_asset(
        self,
        actor: User,
        kind: ItemKind,
        title: str,
        *,
        team_ids: Iterable[str],
        files: dict[str, bytes] | None = None,
        external_url: str | None = None,
        citation_text: str = "",
        policy: AccessPolicy | None = None,
    ) -> Asset:
        self._require_actor(actor)
        if (files is None) == (external_url is None):
            raise InvalidInput("an asset holds either stored files or an external reference")
        teams = set(team_ids)
        if not teams:
            raise InvalidInput("an asset needs at least one owning team")
        for team_id in teams:
            self.store.require("team", team_id)
        if not teams & self._fresh(actor).team_ids():
            raise AccessDenied("actor must belong to one of the owning teams")
        asset = Asset(
            id=self.store.next_id("asset", "a"),
            kind=kind,
            title=title,
            team_ids=teams,
            files={p: FileEntry(c, guess_media_type(p)) for p, c in (files or {}).items()} if files else None,
            external_url=external_url,
            citation_text=citation_text,
            policy=policy or self._default_policy(teams),
        )
        self.store.put("asset", asset.id, serde.asset_to_dict(asset, self.store.put_blob))
        return asset

    def get_asset(self, asset_id: str) -> Asset:
        return serde.asset_from_dict(self.store.require("asset", asset_id), self.store.get_blob)

    # -- registration pipeline ------------------------------------------------------

    def preview_registration(self, source, overrides: dict | None = None) -> RegistrationPreview:
        acquired, structure, draft = self._assemble(source, overrides or {}, submitter="")
        report = validate_entry(draft)
        return RegistrationPreview(
            prefill=self._prefill_view(draft),
            structure=structure,
            report_errors=list(report.errors),
            report_warnings=list(report.warnings),
            detected_class=draft.workflow_class,
            main_path=acquired.main_path,
        )

    def register_workflow(self, actor: User, source, overrides: dict | None = None) -> WorkflowEntry:
        self._require_actor(actor)
        actor = self._fresh(actor)
        acquired, structure, draft = self._assemble(source, overrides or {}, submitter=actor.id)

        for team_id in draft.team_ids:
            self.store.require("team", team_id)
        if draft.team_ids and not draft.team_ids & actor.team_ids():
            raise AccessDenied("actor must be a member of at least one owning team")

        report = validate_entry(draft)
        if not report.ok:
            raise ValidationFailed(report)

        draft.id = self.store.next_id("entry", "w")
        self._persist_entry(draft)
        return self._entry(draft.id)

    def _assemble(self, source, overrides: dict, submitter: str):
        unknown = set(overrides) - WIZARD_FIELDS - {"main_workflow_path", "workflow_class", "diagram_path"}
        if unknown:
            raise InvalidInput(f"unknown metadata fields: {', '.join(sorted(unknown))}")

        acquired = self._acquire(source)
        if overrides.get("main_workflow_path"):
            main = overrides["main_workflow_path"]
            if main not in acquired.files:
                raise InvalidInput(f"main workflow path {main!r} is not among the files")
            acquired.main_path = main

        class_id = overrides.get("workflow_class") or acquired.prefill.get("workflow_class")
        if class_id:
            resolved = self.classes.by_display_name(str(class_id))
            class_id = resolved.id if resolved else str(class_id)
        else:
            main_file = acquired.files[acquired.main_path]
            if len(main_file.content) <= MAX_PARSE_BYTES:
                class_id = detect_class(acquired.main_path, main_file.content, registry=self.classes)
            else:
                class_id = OTHER_CLASS_ID

        structure = self.parse_structure(class_id, acquired.files, acquired.main_path)

        prefill = dict(acquired.prefill)
        prefill.pop("workflow_class", None)
        if structure is not None:
            prefill.setdefault("title", structure.name)
            prefill.setdefault("description", structure.description)
            if structure.raw_tool_ids and "tool_refs" not in prefill:
                prefill["tool_refs"] = map_tools_to_biotools(structure.raw_tool_ids)
            if structure.edam_topics and "edam_topics" not in prefill:
                prefill["edam_topics"] = list(structure.edam_topics)
            if structure.edam_operations and "edam_operations" not in prefill:
                prefill["edam_operations"] = list(structure.edam_operations)

        merged = {k: v for k, v in prefill.items() if v not in (None, "", [], {})}
        merged.update({k: v for k, v in overrides.items() if k in WIZARD_FIELDS})

        team_ids = set(merged.get("team_ids") or [])
        if not merged.get("license"):
            for team_id in sorted(team_ids):
                doc = self.store.get("team", team_id)
                if doc and doc.get("default_license"):
                    merged["license"] = doc["default_license"]
                    break

        policy = merged.get("policy")
        if isinstance(policy, dict):
            policy = serde.policy_from_dict(policy)
        if policy is None:
            policy = self._default_policy(team_ids)
        else:
            policy = self._normalize_policy(policy, team_ids)

        creators = [
            c if isinstance(c, Creator) else serde.creator_from_dict(c)
            for c in merged.get("creators") or []
        ]
        tool_refs = []
        for t in merged.get("tool_refs") or []:
            ref = t if isinstance(t, ToolRef) else serde.tool_ref_from_dict(t)
            if not ref.display_name:
                ref.display_name = ref.raw_id
            tool_refs.append(ref)

        now = self.clock()
        maturity = merged.get("maturity", Maturity.WORK_IN_PROGRESS)
        if isinstance(maturity, str):
            maturity = Maturity(maturity)

        if acquired.abstract_cwl_path is None and structure is not None and class_id != "cwl":
            try:
                abstract = generate_abstract_cwl(structure)
            except FlowHubError:
                abstract = None
            if abstract and ABSTRACT_CWL_FILENAME not in acquired.files:
                acquired.files[ABSTRACT_CWL_FILENAME] = FileEntry(abstract, "application/x-yaml")
                acquired.abstract_cwl_path = ABSTRACT_CWL_FILENAME
        elif class_id == "cwl" and acquired.abstract_cwl_path is None:
            acquired.abstract_cwl_path = acquired.main_path

        version = WorkflowVersion(
            version=1,
            files=acquired.files,
            main_workflow_path=acquired.main_path,
            source=acquired.source,
            created_at=now,
            diagram_path=overrides.get("diagram_path") or acquired.diagram_path,
            abstract_cwl_path=acquired.abstract_cwl_path,
        )
        draft = WorkflowEntry(
            id="pending",
            title=(merged.get("title") or "").strip(),
            team_ids=team_ids,
            submitter=submitter,
            workflow_class=class_id,
            creators=creators,
            other_contributors=merged.get("other_contributors", ""),
            description=merged.get("description") or "",
            maturity=maturity,
            license=merged.get("license"),
            tags=list(merged.get("tags") or []),
            edam_topics=list(merged.get("edam_topics") or []),
            edam_operations=list(merged.get("edam_operations") or []),
            tool_refs=tool_refs,
            attributions=list(merged.get("attributions") or []),
            custom_citation=merged.get("custom_citation"),
            versions=[version],
            policy=policy,
            created_at=now,
            updated_at=now,
        )
        return acquired, structure, draft

    def _acquire(self, source) -> AcquiredContent:
        if isinstance(source, UploadSpec):
            if not source.files:
                raise InvalidInput("no files uploaded")
            if source.main_path not in source.files:
                raise InvalidInput(f"main workflow path {source.main_path!r} is not among the files")
            self._check_file_sizes(source.files)
            files = {
                p: FileEntry(c, source.media_types.get(p) or guess_media_type(p))
                for p, c in source.files.items()
            }
            return AcquiredContent(
                files=files,
                main_path=source.main_path,
                source=UploadSource(),
                diagram_path=self._spot_diagram(files),
            )

        if isinstance(source, CrateSpec):
            contents = read_crate(source.archive)
            files = {
                p: FileEntry(c, contents.media_types.get(p) or guess_media_type(p))
                for p, c in contents.files.items()
            }
            prefill = {
                "title": contents.title,
                "description": contents.description,
                "license": contents.license,
                "creators": contents.creators,
                "workflow_class": contents.workflow_class,
                "edam_topics": contents.edam_topics,
                "edam_operations": contents.edam_operations,
                "tags": contents.tags,
                "maturity": contents.maturity,
                "custom_citation": contents.custom_citation,
                "tool_refs": contents.tool_refs,
                "team_ids": contents.team_ids or None,
                "policy": contents.policy,
                "attributions": [
                    t for t in contents.attribution_ids if self.store.get("entry", t) is not None
                ]
                or None,
            }
            return AcquiredContent(
                files=files,
                main_path=contents.main_workflow_path,
                source=CrateSource(),
                prefill=prefill,
                diagram_path=contents.diagram_path,
                abstract_cwl_path=contents.abstract_cwl_path,
                crate=contents,
            )

        if isinstance(source, GitSpec):
            snapshot = gitio.import_repository(source.remote, source.ref)
            files = {p: FileEntry(c, guess_media_type(p)) for p, c in snapshot.files.items()}
            candidates = gitio.detect_workflow_files(snapshot, registry=self.classes)
            if not candidates:
                raise InvalidInput("no workflow file detected in the repository")
            main_path, class_id = candidates[0]
            prefill: dict = {"workflow_class": class_id}
            readme = gitio.extract_readme(snapshot)
            if readme:
                prefill["description"] = readme
            citation_bytes = gitio.find_citation_file(snapshot)
            if citation_bytes:
                try:
                    citation = parse_citation_cff(citation_bytes)
                except FlowHubError:
                    citation = None
                if citation:
                    prefill["title"] = citation.title
                    prefill["creators"] = [
                        Creator(a.display_name or a.family, a.orcid, a.affiliation)
                        for a in citation.authors
                    ]
                    if citation.preferred_citation:
                        prefill["custom_citation"] = citation.preferred_citation
            return AcquiredContent(
                files=files,
                main_path=main_path,
                source=GitSource(source.remote, snapshot.commit_id, snapshot.ref),
                prefill=prefill,
                diagram_path=self._spot_diagram(files),
            )

        raise InvalidInput(f"unsupported registration source {type(source).__name__}")

    def _check_file_sizes(self, files: dict[str, bytes]) -> None:
        limit = self.config.max_file_bytes
        for path, content in files.items():
            if len(content) > limit:
                from ..errors import SizeLimit

                raise SizeLimit(f"{path} exceeds the configured {self.config.max_file_mb} MiB limit")

    @staticmethod
    def _spot_diagram(files: dict[str, FileEntry]) -> str | None:
        for path in sorted(files):
            stem = path.rsplit("/", 1)[-1].lower()
            if "diagram" in stem and stem.endswith((".png", ".svg", ".jpg", ".jpeg")):
                return path
        return None

    def parse_structure(
        self, class_id: str, files: dict[str, FileEntry], main_path: str
    ) -> WorkflowStructure | None:
        """Best-effort structure extraction; never fails a registration."""
        raw = {p: f.content for p, f in files.items()}
        main = raw.get(main_path, b"")
        if len(main) > MAX_PARSE_BYTES:
            return None
        try:
            if class_id == "galaxy":
                return parse_galaxy(main)
            if class_id == "cwl":
                return parse_cwl_abstract(main)
            if class_id == "nextflow":
                return parse_nextflow_manifest(raw)
            if class_id == "snakemake":
                return parse_snakemake(raw)
        except FlowHubError:
            return None
        return None

    def _default_policy(self, team_ids: set[str]) -> AccessPolicy:
        policy: AccessPolicy | None = None
        for team_id in sorted(team_ids):
            doc = self.store.get("team", team_id)
            if doc is not None:
                policy = serde.policy_from_dict(doc["default_policy"])
                break
        return self._normalize_policy(policy or AccessPolicy(), team_ids)

    @staticmethod
    def _normalize_policy(policy: AccessPolicy, team_ids: set[str]) -> AccessPolicy:
        """Every owning team keeps manage rights over its own entry."""
        policy = policy.copy()
        covered = {
            g.subject_id
            for g in policy.grants
            if g.subject_kind == SubjectKind.TEAM and g.right == Right.MANAGE
        }
        for team_id in sorted(team_ids):
            if team_id not in covered:
                policy.grants.append(Grant(SubjectKind.TEAM, team_id, Right.MANAGE))
        return policy

    def _prefill_view(self, draft: WorkflowEntry) -> dict:
        return {
            "title": draft.title,
            "description": draft.description,
            "license": draft.license,
            "creators": [serde.creator_to_dict(c) for c in draft.creators],
            "maturity": draft.maturity.value,
            "tags": list(draft.tags),
            "edam_topics": list(draft.edam_topics),
            "edam_operations": list(draft.edam_operations),
            "tool_refs": [serde.tool_ref_to_dict(t) for t in draft.tool_refs],
            "attributions": list(draft.attributions),
            "custom_citation": draft.custom_citation,
            "team_ids": sorted(draft.team_ids),
            "workflow_class": draft.workflow_class,
        }

    def _persist_entry(self, entry: WorkflowEntry) -> None:
        doc = serde.entry_to_dict(entry, self.store.put_blob)
        self.store.put("entry", entry.id, doc)
        with self._index_lock:
            self._tokens[entry.id] = self._entry_tokens(entry)

    # -- versioning ---------------------------------------------------------------

    def add_version(self, actor: User, entry_id: str, source, *, comment: str = "") -> WorkflowVersion:
        self._require_actor(actor)
        with self.store.entity_lock("entry", entry_id):
            entry = self.entry_for(actor, entry_id, Right.EDIT)
            acquired = self._acquire(source)
            number = max((v.version for v in entry.versions), default=0) + 1
            if acquired.abstract_cwl_path is None and entry.workflow_class == "cwl":
                acquired.abstract_cwl_path = acquired.main_path
            version = WorkflowVersion(
                version=number,
                files=acquired.files,
                main_workflow_path=acquired.main_path,
                source=acquired.source,
                created_at=self.clock(),
                diagram_path=acquired.diagram_path,
                abstract_cwl_path=acquired.abstract_cwl_path,
                revision_comment=comment,
            )
            entry.versions.append(version)
            entry.updated_at = self.clock()
            self._persist_entry(entry)
        self._emit(entry_id, "new_version", {"version": number, "comment": comment})
        return version

    def update_version_file(
        self,
        actor: User,
        entry_id: str,
        version_number: int,
        path: str,
        content: bytes | None,
        media_type: str | None = None,
    ) -> WorkflowVersion:
        """Add, replace or (content=None) delete one file of a version."""
        self._require_actor(actor)
        with self.store.entity_lock("entry", entry_id):
            entry = self.entry_for(actor, entry_id, Right.EDIT)
            version = entry.get_version(version_number)
            if version is None:
                raise NotFoundError(f"version {version_number} of {entry_id} does not exist")
            if version.frozen:
                raise FrozenVersion(f"version {version_number} of {entry_id} is frozen")
            if content is None:
                if path == version.main_workflow_path:
                    raise InvalidInput("the main workflow file cannot be deleted")
                if path not in version.files:
                    raise NotFoundError(f"{path!r} is not part of version {version_number}")
                del version.files[path]
            else:
                self._check_file_sizes({path: content})
                version.files[path] = FileEntry(content, media_type or guess_media_type(path))
            entry.updated_at = self.clock()
            self._persist_entry(entry)
            return version

    def freeze_version(self, actor: User, entry_id: str, version_number: int) -> None:
        self._require_actor(actor)
        with self.store.entity_lock("entry", entry_id):
            entry = self.entry_for(actor, entry_id, Right.MANAGE)
            version = entry.get_version(version_number)
            if version is None:
                raise NotFoundError(f"version {version_number} of {entry_id} does not exist")
            if version.frozen:
                return  # idempotent
            version.frozen = True
            self._persist_entry(entry)

    # -- metadata -------------------------------------------------------------------

    def update_metadata(self, actor: User, entry_id: str, patch: dict) -> WorkflowEntry:
        self._require_actor(actor)
        unknown = set(patch) - WIZARD_FIELDS
        if unknown:
            raise InvalidInput(f"fields not editable through the wizard: {', '.join(sorted(unknown))}")
        with self.store.entity_lock("entry", entry_id):
            entry = self.entry_for(actor, entry_id, Right.EDIT)

            if "title" in patch:
                entry.title = (patch["title"] or "").strip()
            if "description" in patch:
                entry.description = patch["description"] or ""
            if "creators" in patch:
                entry.creators = [
                    c if isinstance(c, Creator) else serde.creator_from_dict(c)
                    for c in patch["creators"] or []
                ]
            if "maturity" in patch:
                entry.maturity = Maturity(patch["maturity"])
            if "license" in patch:
                entry.license = patch["license"]
            if "tags" in patch:
                entry.tags = list(patch["tags"] or [])
            if "edam_topics" in patch:
                entry.edam_topics = list(patch["edam_topics"] or [])
            if "edam_operations" in patch:
                entry.edam_operations = list(patch["edam_operations"] or [])
            if "tool_refs" in patch:
                entry.tool_refs = [
                    t if isinstance(t, ToolRef) else serde.tool_ref_from_dict(t)
                    for t in patch["tool_refs"] or []
                ]
            if "attributions" in patch:
                entry.attributions = list(patch["attributions"] or [])
            if "custom_citation" in patch:
                entry.custom_citation = patch["custom_citation"]
            if "other_contributors" in patch:
                entry.other_contributors = patch["other_contributors"] or ""
            if "team_ids" in patch:
                new_teams = set(patch["team_ids"] or [])
                for team_id in new_teams:
                    self.store.require("team", team_id)
                entry.team_ids = new_teams
                entry.policy = self._normalize_policy(entry.policy, new_teams)
            if "policy" in patch:
                policy = patch["policy"]
                entry.policy = self._normalize_policy(
                    policy if isinstance(policy, AccessPolicy) else serde.policy_from_dict(policy),
                    entry.team_ids,
                )

            self._check_attribution_cycles(entry)
            report = validate_entry(entry)
            if not report.ok:
                raise ValidationFailed(report)
            entry.updated_at = self.clock()
            self._persist_entry(entry)
        self._emit(entry_id, "metadata_changed", {"fields": sorted(patch)})
        return self._entry(entry_id)

    def _check_attribution_cycles(self, entry: WorkflowEntry) -> None:
        if entry.id in entry.attributions:
            raise AttributionCycle("an entry cannot be based on itself")
        for target in entry.attributions:
            if self.store.get("entry", target) is None:
                raise NotFoundError(f"attributed entry {target!r} does not exist")
        # DFS over the attribution graph with the patched entry in place
        graph = {e_id: self.store.require("entry", e_id).get("attributions", []) for e_id in self.store.ids("entry")}
        graph[entry.id] = list(entry.attributions)
        seen: set[str] = set()
        stack: list[str] = []

        def visit(node: str) -> None:
            if node in stack:
                cycle = " -> ".join(stack[stack.index(node):] + [node])
                raise AttributionCycle(f"attribution cycle: {cycle}")
            if node in seen:
                return
            stack.append(node)
            for nxt in graph.get(node, []):
                visit(nxt)
            stack.pop()
            seen.add(node)

        visit(entry.id)

    def delete_entry(self, actor: User, entry_id: str) -> None:
        self._require_actor(actor)
        with self.store.entity_lock("entry", entry_id):
            self.entry_for(actor, entry_id, Right.MANAGE)
            self.store.delete("entry", entry_id)
            with self._index_lock:
                self._tokens.pop(entry_id, None)
        for coll_id in self.store.ids("collection"):
            coll = self.get_collection(coll_id)
            kept = [i for i in coll.items if not (i.kind == ItemKind.WORKFLOW and i.target == entry_id)]
            if len(kept) != len(coll.items):
                coll.items = kept
                self.store.put("collection", coll.id, serde.collection_to_dict(coll))
        for sub_id in self.store.ids("subscription"):
            if sub_id.endswith(f":{entry_id}"):
                self.store.delete("subscription", sub_id)

    # -- DOI --------------------------------------------------------------------------

    def mint_doi(self, actor: User, entry_id: str, version_number: int) -> DoiRecord:
        self._require_actor(actor)
        with self.store.entity_lock("entry", entry_id):
            entry = self.entry_for(actor, entry_id, Right.MANAGE)
            version = entry.get_version(version_number)
            if version is None:
                raise NotFoundError(f"version {version_number} of {entry_id} does not exist")
            existing = self.store.get("doi", f"{entry_id}.{version_number}")
            if existing is not None:
                return DoiRecord(
                    doi=existing["doi"],
                    entry_id=entry_id,
                    version=version_number,
                    datacite_payload=existing["datacite_payload"],
                    minted_at=datetime.fromisoformat(existing["minted_at"]),
                )
            if entry.policy.visibility != Visibility.PUBLIC:
                raise VisibilityRequired("DOIs are minted for public entries only")

            doi = format_doi(self.config.doi_prefix, entry_id, version_number)
            now = self.clock()
            payload = build_datacite_payload(
                entry,
                version,
                doi,
                publisher=self.config.registry_name,
                base_url=self.config.base_url,
                year=now.year,
            )
            self.doi_client.mint(doi, payload)  # MintFailed propagates; nothing stored

            version.frozen = True
            entry.doi_records[version_number] = doi
            self._persist_entry(entry)
            record = DoiRecord(doi, entry_id, version_number, payload, now)
            self.store.put(
                "doi",
                f"{entry_id}.{version_number}",
                {
                    "doi": doi,
                    "entry_id": entry_id,
                    "version": version_number,
                    "datacite_payload": payload,
                    "minted_at": now.isoformat(),
                },
            )
        self._emit(entry_id, "doi_minted", {"version": version_number, "doi": doi})
        return record

    # -- metrics ------------------------------------------------------------------------

    def record_activity(self, entry_id: str, kind: str) -> Metrics:
        if kind not in ("view", "download"):
            raise InvalidInput(f"unknown activity kind {kind!r}")
        with self.store.entity_lock("entry", entry_id):
            entry = self._entry(entry_id)
            if kind == "view":
                entry.metrics.views += 1
            else:
                entry.metrics.downloads += 1
            self._persist_entry(entry)
            return entry.metrics

    # -- crate export ---------------------------------------------------------------------

    def export_crate(self, actor: User | None, entry_id: str, version_number: int | None = None) -> bytes:
        entry = self.entry_for(actor, entry_id, Right.DOWNLOAD)
        version = (
            entry.get_version(version_number) if version_number is not None else entry.head()
        )
        if version is None:
            raise NotFoundError(f"version {version_number} of {entry_id} does not exist")
        crate = build_crate(entry, version, base_url=self.config.base_url)
        return crate.archive

    def bioschemas_for(self, entry: WorkflowEntry, version: WorkflowVersion) -> dict:
        structure = self.parse_structure(entry.workflow_class, version.files, version.main_workflow_path)
        return emit_bioschemas(entry, version, structure, base_url=self.config.base_url)

    # -- git sync ------------------------------------------------------------------------

    def sync_git_releases(self, actor: User, entry_id: str) -> list[WorkflowVersion]:
        self._require_actor(actor)
        entry = self.entry_for(actor, entry_id, Right.EDIT)
        head = entry.head()
        if head is None or not isinstance(head.source, GitSource):
            raise InvalidInput("entry is not git-sourced; nothing to sync")
        remote = head.source.remote
        snapshot = gitio.import_repository(remote)
        known_commits = {
            v.source.commit_id for v in entry.versions if isinstance(v.source, GitSource)
        }
        created = []
        for tag, commit_id, _ in gitio.enumerate_releases(snapshot):
            if commit_id in known_commits:
                continue
            created.append(
                self.add_version(actor, entry_id, GitSpec(remote, tag), comment=f"release {tag}")
            )
            known_commits.add(commit_id)
        return created

    # -- collections -----------------------------------------------------------------------

    def create_collection(
        self, actor: User, title: str, *, description: str = "", curator_team_ids: Iterable[str]
    ) -> Collection:
        self._require_actor(actor)
        teams = set(curator_team_ids)
        if not title.strip():
            raise InvalidInput("collection title must not be empty")
        if not teams:
            raise InvalidInput("a collection needs at least one curator team")
        for team_id in teams:
            self.store.require("team", team_id)
        if not teams & self._fresh(actor).team_ids():
            raise AccessDenied("actor must belong to a curator team")
        coll = Collection(
            id=self.store.next_id("collection", "c"),
            title=title.strip(),
            description=description,
            curator_team_ids=teams,
        )
        self.store.put("collection", coll.id, serde.collection_to_dict(coll))
        return coll

    def add_collection_item(self, actor: User, collection_id: str, kind: ItemKind, target: str) -> Collection:
        self._require_actor(actor)
        with self.store.entity_lock("collection", collection_id):
            coll = self.get_collection(collection_id)
            self._require_curator(actor, coll)
            if any(i.kind == kind and i.target == target for i in coll.items):
                raise DuplicateItem(f"{kind.value} {target!r} is already in the collection")
            if kind == ItemKind.WORKFLOW:
                self.store.require("entry", target)
            coll.items.append(CollectionItem(kind, target))
            self.store.put("collection", coll.id, serde.collection_to_dict(coll))
            return coll

    def remove_collection_item(self, actor: User, collection_id: str, kind: ItemKind, target: str) -> Collection:
        self._require_actor(actor)
        with self.store.entity_lock("collection", collection_id):
            coll = self.get_collection(collection_id)
            self._require_curator(actor, coll)
            before = len(coll.items)
            coll.items = [i for i in coll.items if not (i.kind == kind and i.target == target)]
            if len(coll.items) == before:
                raise NotFoundError(f"{kind.value} {target!r} is not in the collection")
            self.store.put("collection", coll.id, serde.collection_to_dict(coll))
            return coll

    def delete_collection(self, actor: User, collection_id: str) -> None:
        self._require_actor(actor)
        coll = self.get_collection(collection_id)
        self._require_curator(actor, coll)
        self.store.delete("collection", collection_id)

    def collections_containing(self, entry_id: str) -> list[Collection]:
        found = []
        for coll_id in self.store.ids("collection"):
            coll = self.get_collection(coll_id)
            if any(i.kind == ItemKind.WORKFLOW and i.target == entry_id for i in coll.items):
                found.append(coll)
        return found

    def _require_curator(self, actor: User, coll: Collection) -> None:
        actor = self._fresh(actor)
        if not (actor.site_admin or coll.curator_team_ids & actor.team_ids()):
            raise AccessDenied("actor must belong to a curator team")

    # -- subscriptions and notifications -------------------------------------------------------

    def subscribe(self, actor: User, entry_id: str) -> None:
        self._require_actor(actor)
        self.entry_for(actor, entry_id, Right.VIEW)
        self.store.put("subscription", f"{actor.id}:{entry_id}", {"user_id": actor.id, "entry_id": entry_id})

    def unsubscribe(self, actor: User, entry_id: str) -> None:
        self._require_actor(actor)
        self.store.delete("subscription", f"{actor.id}:{entry_id}")

    def subscriptions_of(self, actor: User) -> set[str]:
        subs = set()
        for sub_id in self.store.ids("subscription"):
            doc = self.store.require("subscription", sub_id)
            if doc["user_id"] == actor.id:
                subs.add(doc["entry_id"])
        return subs

    def list_notifications(self, actor: User) -> list[dict]:
        self._require_actor(actor)
        subscribed = self.subscriptions_of(actor)
        events = [e for e in self.store.events() if e.get("entry_id") in subscribed]
        return sorted(events, key=lambda e: e["seq"], reverse=True)

    def _emit(self, entry_id: str, kind: str, payload: dict) -> dict:
        return self.store.append_event(
            {"entry_id": entry_id, "kind": kind, "timestamp": self.clock().isoformat(), "payload": payload}
        )

    # -- credit ----------------------------------------------------------------------------------

    def resolve_credit(self, entry_id: str) -> CreditGraph:
        entry = self._entry(entry_id)
        return resolve_credit(entry, teams=self.teams(), spaces=self.spaces(), users=self.users())

    # -- search ------------------------------------------------------------------------------------

    def search(self, actor: User | None, query: SearchQuery) -> SearchResult:
        query.validate()
        actor = self._fresh(actor)
        teams = self.teams()
        spaces = self.spaces()
        users = self.users()
        organisations = self.organisations()
        now = self.clock()

        candidates: list[Candidate] = []
        stubs: list[EmbargoStub] = []
        for entry in self.all_entries():
            decision = check_access(actor, entry, Right.VIEW, teams=teams, spaces=spaces, now=now)
            if decision.allow:
                with self._index_lock:
                    tokens = self._tokens.get(entry.id) or self._entry_tokens(entry)
                candidates.append(
                    Candidate(entry, tokens, self.facet_values(entry, teams, spaces, users, organisations))
                )
            elif (
                entry.policy.visibility == Visibility.EMBARGOED
                and not self.config.embargo_hides_listing
            ):
                stubs.append(
                    EmbargoStub(
                        id=entry.id,
                        title=entry.title,
                        workflow_class=entry.workflow_class,
                        team_ids=sorted(entry.team_ids),
                        embargo_until=entry.policy.embargo_until.isoformat()
                        if entry.policy.embargo_until
                        else None,
                    )
                )
        result = run_search(query, candidates)
        result.embargoed = sorted(stubs, key=lambda s: s.id)
        return result

    def facet_values(
        self,
        entry: WorkflowEntry,
        teams: dict[str, Team] | None = None,
        spaces: dict[str, Space] | None = None,
        users: dict[str, User] | None = None,
        organisations: dict[str, Organisation] | None = None,
    ) -> dict[str, set[str]]:
        teams = teams if teams is not None else self.teams()
        spaces = spaces if spaces is not None else self.spaces()
        users = users if users is not None else self.users()
        organisations = organisations if organisations is not None else self.organisations()

        team_names = set()
        space_names = set()
        org_names = set()
        for team_id in entry.team_ids:
            team = teams.get(team_id)
            if team is None:
                continue
            team_names.add(team.name)
            space = spaces.get(team.space_id)
            if space is not None:
                space_names.add(space.name)
            for member in team.members:
                user = users.get(member.user_id)
                membership = user.membership_for(team_id) if user else None
                for org_id in membership.organisation_ids if membership else ():
                    org = organisations.get(org_id)
                    if org is not None:
                        org_names.add(org.name)

        workflow_class = self.classes.get(entry.workflow_class)
        return {
            "class": {workflow_class.display_name if workflow_class else entry.workflow_class},
            "tag": set(entry.tags),
            "creator": {c.name for c in entry.creators},
            "team": team_names,
            "space": space_names,
            "organisation": org_names,
            "maturity": {entry.maturity.value},
            "edam_topic": set(entry.edam_topics),
            "edam_operation": set(entry.edam_operations),
            "tool": {t.biotools_id or t.display_name or t.raw_id for t in entry.tool_refs},
        }

    # -- launchers -----------------------------------------------------------------------------------

    def launch_options(self, entry: WorkflowEntry, version_number: int | None = None) -> list[dict]:
        from urllib.parse import quote

        version = entry.get_version(version_number) if version_number else entry.head()
        if version is None:
            return []
        options = []
        for launcher in sorted(self.config.launchers.values(), key=lambda l: l.id):
            if not launcher.supports(entry.workflow_class):
                continue
            url = launcher.url_template.format(
                trs_id=quote(f"#workflow/{entry.id}", safe=""),
                version=version.version,
                trs_endpoint=f"{self.config.base_url}/ga4gh/trs/v2",
                base_url=self.config.base_url,
            )
            options.append({"id": launcher.id, "url": url})
        return options

    # -- helpers ---------------------------------------------------------------------------------------

    @staticmethod
    def _require_actor(actor: User | None) -> None:
        if actor is None:
            raise AuthRequired("this operation requires authentication")
