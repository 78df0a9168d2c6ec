"""Git repository import.

Wraps the system ``git`` client: HTTPS clones (shallow, depth 50) and
local repositories are supported; SSH is not.  A snapshot captures the
checked-out file tree, the commit log from the resolved ref, and the
repository's tags so releases can be enumerated without re-fetching.
"""

from __future__ import annotations

import subprocess
import tempfile
import threading
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path, PurePosixPath

from .errors import FetchError, RefNotFound, SizeLimit
from .parsers import ClassRegistry, detect_class
from .parsers.detect import MAX_PARSE_BYTES, OTHER_CLASS_ID

MAX_TOTAL_BYTES = 256 * 1024 * 1024
MAX_FILES = 10_000
SHALLOW_DEPTH = 50

_remote_locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
_locks_guard = threading.Lock()


@dataclass(frozen=True)
class CommitInfo:
    commit_id: str
    message: str
    timestamp: datetime


@dataclass(frozen=True)
class TagInfo:
    name: str
    commit_id: str
    timestamp: datetime


@dataclass
class RepositorySnapshot:
    remote: str
    ref: str
    commit_id: str
    files: dict[str, bytes]
    commit_log: list[CommitInfo]  # newest first; head == commit_id
    tags: list[TagInfo] = field(default_factory=list)


def import_repository(
    remote: str,
    ref: str | None = None,
    *,
    max_total_bytes: int = MAX_TOTAL_BYTES,
    max_files: int = MAX_FILES,
) -> RepositorySnapshot:
    with _lock_for(remote):
        with tempfile.TemporaryDirectory(prefix="flowhub-git-") as tmp:
            workdir = Path(tmp) / "repo"
            _clone(remote, workdir)
            commit_id, resolved_ref = _resolve_ref(workdir, ref)
            _git(workdir, "-c", "advice.detachedHead=false", "checkout", "--quiet", commit_id)
            files = _collect_files(workdir, max_total_bytes, max_files)
            commit_log = _commit_log(workdir)
            tags = _tags(workdir)
    return RepositorySnapshot(
        remote=remote,
        ref=resolved_ref,
        commit_id=commit_id,
        files=files,
        commit_log=commit_log,
        tags=tags,
    )


def detect_workflow_files(
    snapshot: RepositorySnapshot, *, registry: ClassRegistry | None = None
) -> list[tuple[str, str]]:
    """Rank candidate workflow files; the top one is the proposed main.

    Files classified as the fallback class are not candidates.  Ordering
    is total: shallower paths first, then lexicographic.
    """
    candidates = []
    for path, content in snapshot.files.items():
        if len(content) > MAX_PARSE_BYTES:
            continue  # stored but not parsed
        class_id = detect_class(path, content, registry=registry)
        if class_id != OTHER_CLASS_ID:
            candidates.append((path, class_id))
    candidates.sort(key=lambda item: (item[0].count("/"), item[0]))
    return candidates


def extract_readme(snapshot: RepositorySnapshot) -> str | None:
    """First README.md/README, case-insensitive, root before subdirectories."""
    candidates = []
    for path in snapshot.files:
        name = PurePosixPath(path).name.lower()
        if name in ("readme.md", "readme"):
            candidates.append((path.count("/"), 0 if name == "readme.md" else 1, path))
    if not candidates:
        return None
    candidates.sort()
    return snapshot.files[candidates[0][2]].decode("utf-8", errors="replace")


def enumerate_releases(snapshot: RepositorySnapshot) -> list[tuple[str, str, datetime]]:
    """Tags ordered by commit timestamp ascending, name as the tie-break."""
    ordered = sorted(snapshot.tags, key=lambda t: (t.timestamp, t.name))
    return [(t.name, t.commit_id, t.timestamp) for t in ordered]


def find_citation_file(snapshot: RepositorySnapshot) -> bytes | None:
    """Root-level CITATION.cff, if the repository carries one."""
    for path, content in snapshot.files.items():
        if "/" not in path and path.lower() == "citation.cff":
            return content
    return None


# ---------------------------------------------------------------------------
# git plumbing
# ---------------------------------------------------------------------------


def _lock_for(remote: str) -> threading.Lock:
    with _locks_guard:
        return _remote_locks[remote]


def _is_url(remote: str) -> bool:
    return remote.startswith(("http://", "https://"))


def _clone(remote: str, workdir: Path) -> None:
    cmd = ["git", "clone", "--quiet"]
    if _is_url(remote):
        cmd += ["--depth", str(SHALLOW_DEPTH), "--no-single-branch"]
    cmd += [remote, str(workdir)]
    result = subprocess.run(cmd, capture_output=True, text=True)
    if result.returncode != 0:
        raise FetchError(f"cannot clone {remote!r}: {result.stderr.strip()}")
    if _is_url(remote):
        # tags are not implied by a shallow branch clone
        subprocess.run(
            ["git", "-C", str(workdir), "fetch", "--quiet", "--tags", "--depth", str(SHALLOW_DEPTH)],
            capture_output=True,
            text=True,
        )


def _git(workdir: Path, *args: str) -> str:
    result = subprocess.run(["git", "-C", str(workdir), *args], capture_output=True, text=True)
    if result.returncode != 0:
        raise FetchError(f"git {' '.join(args[:2])} failed: {result.stderr.strip()}")
    return result.stdout


def _resolve_ref(workdir: Path, ref: str | None) -> tuple[str, str]:
    if ref is None:
        commit = _git(workdir, "rev-parse", "HEAD").strip()
        name = _git(workdir, "rev-parse", "--abbrev-ref", "HEAD").strip()
        return commit, name
    for candidate in (ref, f"refs/tags/{ref}", f"origin/{ref}"):
        result = subprocess.run(
            ["git", "-C", str(workdir), "rev-parse", "--verify", "--quiet", f"{candidate}^{{commit}}"],
            capture_output=True,
            text=True,
        )
        if result.returncode == 0:
            return result.stdout.strip(), ref
    raise RefNotFound(f"ref {ref!r} does not exist in the repository")


def _collect_files(workdir: Path, max_total_bytes: int, max_files: int) -> dict[str, bytes]:
    files: dict[str, bytes] = {}
    total = 0
    for path in sorted(workdir.rglob("*")):
        if path.is_dir() or ".git" in path.relative_to(workdir).parts:
            continue
        content = path.read_bytes()
        total += len(content)
        if total > max_total_bytes:
            raise SizeLimit(f"repository exceeds the {max_total_bytes} byte import cap")
        files[path.relative_to(workdir).as_posix()] = content
        if len(files) > max_files:
            raise SizeLimit(f"repository exceeds the {max_files} file import cap")
    return files


def _commit_log(workdir: Path) -> list[CommitInfo]:
    out = _git(workdir, "log", "--format=%H%x00%s%x00%ct")
    log = []
    for line in out.splitlines():
        parts = line.split("\x00")
        if len(parts) == 3:
            log.append(
                CommitInfo(parts[0], parts[1], datetime.fromtimestamp(int(parts[2]), tz=timezone.utc))
            )
    return log


def _tags(workdir: Path) -> list[TagInfo]:
    out = _git(workdir, "for-each-ref", "refs/tags", "--format=%(refname:short)%00%(objectname)%00%(*objectname)")
    tags = []
    for line in out.splitlines():
        name, object_name, peeled = (line.split("\x00") + ["", ""])[:3]
        commit = peeled or object_name  # annotated tags point at a tag object
        if not name or not commit:
            continue
        stamp = _git(workdir, "show", "-s", "--format=%ct", commit).strip().splitlines()
        when = datetime.fromtimestamp(int(stamp[-1]), tz=timezone.utc) if stamp else datetime.now(timezone.utc)
        tags.append(TagInfo(name, commit, when))
    return tags
