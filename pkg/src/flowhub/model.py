"""Domain model: the collaboration hierarchy and the rules that hang off it.

Users belong to Teams, Teams belong to Spaces, and workflow entries are
owned by Teams.  This module defines those types plus the three pure
decision functions the rest of the registry builds on: ``check_access``,
``resolve_credit`` and ``validate_entry``.  Nothing here touches storage;
persistence and mutation live in :mod:`flowhub.registry`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from enum import Enum
from typing import Mapping, Union

from . import vocab
from .errors import IntegrityError

DEFAULT_SPACE_NAME = "Independent Teams"

ORCID_RE = re.compile(r"^\d{4}-\d{4}-\d{4}-\d{3}[\dX]$")
BIOTOOLS_ID_RE = re.compile(r"^[A-Za-z0-9_\-.~]+$")


def orcid_checksum_ok(orcid: str) -> bool:
    """ISO 7064 mod 11-2 check over the 15 base digits and the check char."""
    digits = orcid.replace("-", "")
    total = 0
    for ch in digits[:-1]:
        total = (total + int(ch)) * 2
    remainder = total % 11
    result = (12 - remainder) % 11
    check = "X" if result == 10 else str(result)
    return digits[-1] == check


def is_valid_orcid(orcid: str) -> bool:
    return bool(ORCID_RE.match(orcid)) and orcid_checksum_ok(orcid)


# ---------------------------------------------------------------------------
# Enumerations
# ---------------------------------------------------------------------------


class Right(str, Enum):
    """Rights form a chain: manage > edit > download > view.

    A grant of a right implies every weaker right.
    """

    VIEW = "view"
    DOWNLOAD = "download"
    EDIT = "edit"
    MANAGE = "manage"

    @property
    def rank(self) -> int:
        return _RIGHT_RANK[self]

    def covers(self, other: "Right") -> bool:
        return self.rank >= other.rank


_RIGHT_RANK = {Right.VIEW: 0, Right.DOWNLOAD: 1, Right.EDIT: 2, Right.MANAGE: 3}


class Visibility(str, Enum):
    PUBLIC = "public"
    REGISTERED = "registered"
    EMBARGOED = "embargoed"
    PRIVATE = "private"


class Role(str, Enum):
    ADMIN = "admin"
    MEMBER = "member"


class Maturity(str, Enum):
    WORK_IN_PROGRESS = "work_in_progress"
    STABLE = "stable"


class SubjectKind(str, Enum):
    USER = "user"
    TEAM = "team"
    SPACE = "space"


class ItemKind(str, Enum):
    WORKFLOW = "workflow"
    DOCUMENT = "document"
    SOP = "sop"
    PUBLICATION = "publication"
    PRESENTATION = "presentation"
    DATA_FILE = "data_file"
    EVENT = "event"


# ---------------------------------------------------------------------------
# Collaboration hierarchy
# ---------------------------------------------------------------------------


@dataclass
class Membership:
    team_id: str
    role: Role = Role.MEMBER
    # affiliations the user nominated for this particular team
    organisation_ids: set[str] = field(default_factory=set)


@dataclass
class User:
    id: str
    display_name: str
    orcid: str | None = None
    organisation_ids: set[str] = field(default_factory=set)
    memberships: list[Membership] = field(default_factory=list)
    expertise_tags: list[str] = field(default_factory=list)
    site_admin: bool = False
    api_key_hash: str | None = None

    def team_ids(self) -> set[str]:
        return {m.team_id for m in self.memberships}

    def membership_for(self, team_id: str) -> Membership | None:
        for m in self.memberships:
            if m.team_id == team_id:
                return m
        return None


@dataclass
class Organisation:
    id: str
    name: str
    country: str | None = None  # ISO 3166 alpha-2


@dataclass
class Space:
    id: str
    name: str
    description: str = ""
    admin_user_ids: set[str] = field(default_factory=set)
    is_default: bool = False


@dataclass
class TeamMember:
    user_id: str
    role: Role = Role.MEMBER


@dataclass
class Grant:
    subject_kind: SubjectKind
    subject_id: str
    right: Right


@dataclass
class AccessPolicy:
    visibility: Visibility = Visibility.PRIVATE
    embargo_until: date | None = None
    grants: list[Grant] = field(default_factory=list)

    def copy(self) -> "AccessPolicy":
        return AccessPolicy(self.visibility, self.embargo_until, list(self.grants))


@dataclass
class Team:
    id: str
    name: str
    space_id: str
    description: str = ""
    members: list[TeamMember] = field(default_factory=list)
    default_policy: AccessPolicy = field(default_factory=AccessPolicy)
    default_license: str | None = None

    def admin_ids(self) -> set[str]:
        return {m.user_id for m in self.members if m.role == Role.ADMIN}

    def member_ids(self) -> set[str]:
        return {m.user_id for m in self.members}


# ---------------------------------------------------------------------------
# Workflow entries
# ---------------------------------------------------------------------------


@dataclass
class Creator:
    name: str
    orcid: str | None = None
    affiliation: str | None = None


@dataclass
class ToolRef:
    raw_id: str
    biotools_id: str | None = None
    display_name: str = ""


@dataclass
class FileEntry:
    content: bytes
    media_type: str = "application/octet-stream"


@dataclass
class UploadSource:
    kind: str = "upload"


@dataclass
class CrateSource:
    kind: str = "crate"


@dataclass
class GitSource:
    remote: str
    commit_id: str
    ref: str | None = None
    kind: str = "git"


VersionSource = Union[UploadSource, CrateSource, GitSource]


@dataclass
class WorkflowVersion:
    version: int
    files: dict[str, FileEntry]
    main_workflow_path: str
    source: VersionSource
    created_at: datetime
    diagram_path: str | None = None
    abstract_cwl_path: str | None = None
    frozen: bool = False
    revision_comment: str = ""


@dataclass
class Metrics:
    views: int = 0
    downloads: int = 0


@dataclass
class WorkflowEntry:
    id: str
    title: str
    team_ids: set[str]
    submitter: str
    workflow_class: str = "other"
    creators: list[Creator] = field(default_factory=list)
    other_contributors: str = ""
    description: str = ""
    maturity: Maturity = Maturity.WORK_IN_PROGRESS
    license: str | None = None
    tags: list[str] = field(default_factory=list)
    edam_topics: list[str] = field(default_factory=list)
    edam_operations: list[str] = field(default_factory=list)
    tool_refs: list[ToolRef] = field(default_factory=list)
    attributions: list[str] = field(default_factory=list)
    custom_citation: str | None = None
    test_status: str | None = None  # passing | failing | unknown (badge stub)
    versions: list[WorkflowVersion] = field(default_factory=list)
    metrics: Metrics = field(default_factory=Metrics)
    policy: AccessPolicy = field(default_factory=AccessPolicy)
    doi_records: dict[int, str] = field(default_factory=dict)
    created_at: datetime | None = None
    updated_at: datetime | None = None

    def head(self) -> WorkflowVersion | None:
        return max(self.versions, key=lambda v: v.version) if self.versions else None

    def get_version(self, number: int) -> WorkflowVersion | None:
        for v in self.versions:
            if v.version == number:
                return v
        return None


@dataclass
class CollectionItem:
    kind: ItemKind
    target: str  # entry/asset id or external URL


@dataclass
class Collection:
    id: str
    title: str
    description: str = ""
    curator_team_ids: set[str] = field(default_factory=set)
    items: list[CollectionItem] = field(default_factory=list)


@dataclass
class Asset:
    """A non-workflow digital object, held by value or by reference."""

    id: str
    kind: ItemKind
    title: str
    team_ids: set[str] = field(default_factory=set)
    files: dict[str, FileEntry] | None = None
    external_url: str | None = None
    citation_text: str = ""
    policy: AccessPolicy = field(default_factory=AccessPolicy)


# ---------------------------------------------------------------------------
# Access control
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AccessDecision:
    allow: bool
    reason: str

    def __bool__(self) -> bool:
        return self.allow


def _granted_rank(
    actor: User | None,
    policy: AccessPolicy,
    owner_team_ids: set[str],
    teams: Mapping[str, Team],
    spaces: Mapping[str, Space],
) -> int:
    """Strongest right the actor holds, as a rank; -1 when none.

    Sources, strongest wins: direct user grants, grants to a team the
    actor belongs to, grants to a space holding one of the actor's teams,
    and the implicit manage right of space admins over entries owned by
    teams of their space.
    """
    if actor is None:
        return -1
    rank = -1
    actor_teams = actor.team_ids()
    actor_spaces = {teams[t].space_id for t in actor_teams if t in teams}
    for grant in policy.grants:
        matched = (
            (grant.subject_kind == SubjectKind.USER and grant.subject_id == actor.id)
            or (grant.subject_kind == SubjectKind.TEAM and grant.subject_id in actor_teams)
            or (grant.subject_kind == SubjectKind.SPACE and grant.subject_id in actor_spaces)
        )
        if matched:
            rank = max(rank, grant.right.rank)
    for team_id in owner_team_ids:
        team = teams.get(team_id)
        if team is None:
            continue
        space = spaces.get(team.space_id)
        if space is not None and actor.id in space.admin_user_ids:
            rank = max(rank, Right.MANAGE.rank)
    return rank


def check_access(
    actor: User | None,
    entry: Union[WorkflowEntry, Asset],
    right: Right,
    *,
    teams: Mapping[str, Team],
    spaces: Mapping[str, Space],
    now: datetime | None = None,
) -> AccessDecision:
    """Decide whether ``actor`` (None = anonymous) may exercise ``right``.

    Deny is a value, not an error.  Edit and manage always require
    authentication plus an explicit or implicit grant; view and download
    additionally flow from the entry's visibility.
    """
    now = now or datetime.now(timezone.utc)
    policy = entry.policy
    granted = _granted_rank(actor, policy, set(entry.team_ids), teams, spaces)

    if right.rank >= Right.EDIT.rank:
        if actor is None:
            return AccessDecision(False, "authentication required")
        if granted >= right.rank:
            return AccessDecision(True, "granted")
        return AccessDecision(False, "no sufficient grant")

    if granted >= right.rank:
        return AccessDecision(True, "granted")

    vis = policy.visibility
    if vis == Visibility.PUBLIC:
        return AccessDecision(True, "public")
    if vis == Visibility.REGISTERED:
        if actor is not None:
            return AccessDecision(True, "registered user")
        return AccessDecision(False, "requires a registered account")
    if vis == Visibility.EMBARGOED:
        until = policy.embargo_until
        if until is not None and now.date() >= until:
            return AccessDecision(True, "embargo elapsed")
        return AccessDecision(False, "embargoed")
    return AccessDecision(False, "private")


# ---------------------------------------------------------------------------
# Credit resolution
# ---------------------------------------------------------------------------


@dataclass
class CreditGraph:
    entry_id: str
    creators: list[Creator]
    contributors: str | None
    submitter: str
    team_ids: list[str]
    space_ids: list[str]
    organisation_ids: list[str]
    derived_from: list[str]
    edges: list[tuple[str, str, str]]  # (source node, label, target node)


def resolve_credit(
    entry: WorkflowEntry,
    *,
    teams: Mapping[str, Team],
    spaces: Mapping[str, Space],
    users: Mapping[str, User],
) -> CreditGraph:
    """Cascade credit from an entry up the ownership hierarchy.

    Deterministic for a given store state: all derived collections are
    sorted.  Dangling team or space references raise IntegrityError.
    """
    entry_node = f"entry:{entry.id}"
    edges: list[tuple[str, str, str]] = []

    team_ids = sorted(entry.team_ids)
    space_ids: set[str] = set()
    organisation_ids: set[str] = set()

    for team_id in team_ids:
        team = teams.get(team_id)
        if team is None:
            raise IntegrityError(f"entry {entry.id} references unknown team {team_id}")
        space = spaces.get(team.space_id)
        if space is None:
            raise IntegrityError(f"team {team_id} references unknown space {team.space_id}")
        space_ids.add(space.id)
        edges.append((f"team:{team_id}", "owns", entry_node))
        edges.append((f"space:{space.id}", "administers", f"team:{team_id}"))
        for member in team.members:
            user = users.get(member.user_id)
            if user is None:
                continue
            membership = user.membership_for(team_id)
            if membership is None:
                continue
            for org_id in membership.organisation_ids:
                organisation_ids.add(org_id)
                edges.append((f"team:{team_id}", "affiliates", f"org:{org_id}"))

    for i, creator in enumerate(entry.creators):
        edges.append((f"creator:{i}:{creator.name}", "created", entry_node))
    edges.append((f"user:{entry.submitter}", "submitted", entry_node))
    for target in sorted(set(entry.attributions)):
        edges.append((entry_node, "derives", f"entry:{target}"))

    return CreditGraph(
        entry_id=entry.id,
        creators=list(entry.creators),
        contributors=entry.other_contributors or None,
        submitter=entry.submitter,
        team_ids=team_ids,
        space_ids=sorted(space_ids),
        organisation_ids=sorted(organisation_ids),
        derived_from=sorted(set(entry.attributions)),
        edges=sorted(set(edges)),
    )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Finding:
    code: str
    message: str
    field: str | None = None


@dataclass
class ValidationReport:
    errors: list[Finding] = field(default_factory=list)
    warnings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def error_codes(self) -> set[str]:
        return {f.code for f in self.errors}

    def warning_codes(self) -> set[str]:
        return {f.code for f in self.warnings}


def validate_entry(entry: WorkflowEntry) -> ValidationReport:
    """Check an entry the way the registration wizard would.

    Only a missing title or missing owning teams (or a broken structural
    invariant: self-attribution, bad version numbering, malformed ids)
    block persistence.  Everything else is a completeness warning that
    mirrors the wizard's prompting.
    """
    report = ValidationReport()
    err = report.errors.append
    warn = report.warnings.append

    if not entry.title or not entry.title.strip():
        err(Finding("missing_title", "title is mandatory", "title"))
    if not entry.team_ids:
        err(Finding("missing_teams", "at least one owning team is mandatory", "team_ids"))
    if entry.id in entry.attributions:
        err(Finding("self_attribution", "an entry cannot be based on itself", "attributions"))

    numbers = sorted(v.version for v in entry.versions)
    if numbers and numbers != list(range(1, len(numbers) + 1)):
        err(Finding("invalid_version_sequence", "versions must be unique and sequential from 1", "versions"))

    for i, creator in enumerate(entry.creators):
        if creator.orcid and not is_valid_orcid(creator.orcid):
            err(Finding("invalid_orcid", f"creator {creator.name!r} has an invalid ORCID", f"creators[{i}]"))

    for i, ref in enumerate(entry.tool_refs):
        if ref.biotools_id and not BIOTOOLS_ID_RE.match(ref.biotools_id):
            err(Finding("invalid_biotools_id", f"malformed bio.tools id {ref.biotools_id!r}", f"tool_refs[{i}]"))

    if not entry.license:
        warn(Finding("missing_license", "no license specified", "license"))
    elif entry.license not in vocab.spdx_ids():
        warn(Finding("unknown_license", f"{entry.license!r} is not a known SPDX identifier", "license"))
    if not entry.creators:
        warn(Finding("missing_creators", "no creators listed", "creators"))
    if not entry.description.strip():
        warn(Finding("missing_description", "no description provided", "description"))
    if not entry.edam_topics and not entry.edam_operations:
        warn(Finding("missing_edam_annotations", "no EDAM topic or operation annotations", "edam_topics"))
    for topic in entry.edam_topics:
        if not vocab.is_known_edam(topic) or not topic.startswith("topic_"):
            warn(Finding("unknown_edam_id", f"unknown EDAM topic {topic!r}", "edam_topics"))
    for op in entry.edam_operations:
        if not vocab.is_known_edam(op) or not op.startswith("operation_"):
            warn(Finding("unknown_edam_id", f"unknown EDAM operation {op!r}", "edam_operations"))
    if not entry.tool_refs:
        warn(Finding("missing_tool_refs", "no component tools annotated", "tool_refs"))

    return report
