"""Shared fixtures: a small collaboration hierarchy and entry factories."""

from __future__ import annotations

from datetime import date, datetime, timezone

import pytest

from flowhub.model import (
    AccessPolicy,
    Creator,
    FileEntry,
    Grant,
    Membership,
    Right,
    Role,
    Space,
    SubjectKind,
    Team,
    TeamMember,
    UploadSource,
    User,
    Visibility,
    WorkflowEntry,
    WorkflowVersion,
)

NOW = datetime(2025, 6, 1, 12, 0, 0, tzinfo=timezone.utc)
FUTURE = date(2030, 1, 1)
PAST = date(2020, 1, 1)


def make_version(number=1, files=None, main="wf.ga", created_at=NOW):
    files = files if files is not None else {main: FileEntry(b"{}", "application/json")}
    return WorkflowVersion(
        version=number,
        files=files,
        main_workflow_path=main,
        source=UploadSource(),
        created_at=created_at,
    )


def make_entry(entry_id="w000001", teams=("t1",), visibility=Visibility.PUBLIC, grants=(), **kw):
    policy = AccessPolicy(
        visibility=visibility,
        embargo_until=kw.pop("embargo_until", None),
        grants=list(grants),
    )
    defaults = dict(
        title="Example workflow",
        submitter="u1",
        workflow_class="galaxy",
        versions=[make_version()],
        created_at=NOW,
        updated_at=NOW,
    )
    defaults.update(kw)
    return WorkflowEntry(id=entry_id, team_ids=set(teams), policy=policy, **defaults)


@pytest.fixture
def hierarchy():
    """Two spaces, two teams, and users in every relation used by tests."""
    default_space = Space("s0", "Independent Teams", admin_user_ids=set(), is_default=True)
    space1 = Space("s1", "Genomics Consortium", admin_user_ids={"u_spaceadmin"})
    team1 = Team(
        "t1",
        "Assembly Team",
        space_id="s1",
        members=[TeamMember("u_member", Role.MEMBER), TeamMember("u_admin", Role.ADMIN)],
    )
    team2 = Team("t2", "Other Team", space_id="s0", members=[TeamMember("u_other", Role.ADMIN)])
    users = {
        "u_member": User("u_member", "Member", memberships=[Membership("t1", Role.MEMBER, {"o1"})]),
        "u_admin": User("u_admin", "Admin", memberships=[Membership("t1", Role.ADMIN, {"o2"})]),
        "u_other": User("u_other", "Outsider", memberships=[Membership("t2", Role.ADMIN)]),
        "u_spaceadmin": User("u_spaceadmin", "Space Admin"),
        "u_granted": User("u_granted", "Direct Grantee", memberships=[Membership("t2", Role.MEMBER)]),
    }
    return {
        "spaces": {"s0": default_space, "s1": space1},
        "teams": {"t1": team1, "t2": team2},
        "users": users,
    }


def owning_team_grant(right=Right.MANAGE):
    return Grant(SubjectKind.TEAM, "t1", right)


# Valid ORCIDs for randomized entries (checksummed).
VALID_ORCIDS = [
    "0000-0002-1825-0097",
    "0000-0001-5109-3700",
    "0000-0002-1694-233X",
    "0000-0003-1219-2137",
    "0000-0002-9079-593X",
]

_CLASS_IDS = ["galaxy", "cwl", "nextflow", "snakemake", "jupyter", "python", "bash", "wdl", "other"]
_EDAM_TOPICS = ["topic_0196", "topic_0622", "topic_3168", "topic_0080", "topic_3174"]
_EDAM_OPS = ["operation_0525", "operation_3227", "operation_3198", "operation_0292"]
_LICENSES = ["MIT", "Apache-2.0", "GPL-3.0-or-later", "CC-BY-4.0", None]


def random_entry(rng, entry_id, attributable_ids=(), team_pool=("t1", "t2", "t3")):
    """A randomized but persistable entry, for round-trip style tests."""
    from flowhub.model import Maturity, ToolRef

    creators = []
    orcid_pool = rng.sample(VALID_ORCIDS, len(VALID_ORCIDS))
    for i in range(rng.randint(0, 3)):
        creators.append(
            Creator(
                name=f"Creator {i} {rng.choice('ABCDE')}",
                orcid=orcid_pool.pop() if rng.random() < 0.6 else None,
                affiliation=rng.choice([None, "University of Elsewhere", "CRS4"]),
            )
        )
    tools = [
        ToolRef(raw_id=raw, biotools_id=raw if rng.random() < 0.7 else None, display_name=raw)
        for raw in rng.sample(["bwa", "samtools", "fastqc", "stringtie"], rng.randint(0, 3))
    ]
    visibility = rng.choice(list(Visibility))
    policy = AccessPolicy(
        visibility=visibility,
        embargo_until=date(2031, 3, 14) if visibility == Visibility.EMBARGOED else None,
        grants=[Grant(SubjectKind.TEAM, t, Right.MANAGE) for t in sorted(team_pool)[:2]],
    )
    main = rng.choice(["workflow.ga", "main.nf", "pipeline.cwl"])
    files = {
        main: FileEntry(f"content of {entry_id}".encode(), "application/json"),
        "README.md": FileEntry(b"# readme\n", "text/markdown"),
    }
    diagram = None
    if rng.random() < 0.5:
        files["diagram.png"] = FileEntry(b"\x89PNG fake", "image/png")
        diagram = "diagram.png"
    version = WorkflowVersion(
        version=1,
        files=files,
        main_workflow_path=main,
        source=UploadSource(),
        created_at=NOW,
        diagram_path=diagram,
    )
    return WorkflowEntry(
        id=entry_id,
        title=f"Workflow {entry_id} {rng.choice(['assembly', 'variant calling', 'QC'])}",
        team_ids=set(rng.sample(list(team_pool), rng.randint(1, len(team_pool)))),
        submitter="u1",
        workflow_class=rng.choice(_CLASS_IDS),
        creators=creators,
        description=rng.choice(["", "A description of the analysis."]),
        maturity=rng.choice(list(Maturity)),
        license=rng.choice(_LICENSES),
        tags=rng.sample(["covid", "rnaseq", "qc", "assembly"], rng.randint(0, 3)),
        edam_topics=rng.sample(_EDAM_TOPICS, rng.randint(0, 2)),
        edam_operations=rng.sample(_EDAM_OPS, rng.randint(0, 2)),
        tool_refs=tools,
        attributions=list(rng.sample(list(attributable_ids), min(len(attributable_ids), rng.randint(0, 2)))),
        custom_citation=rng.choice([None, "Please cite the companion paper."]),
        versions=[version],
        policy=policy,
        created_at=NOW,
        updated_at=NOW,
    )
