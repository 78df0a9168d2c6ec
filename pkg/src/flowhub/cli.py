"""Operator and power-user command line.

Commands operate directly on the configured store (the same code paths
the HTTP API uses), so a CLI invocation and the equivalent API call have
identical observable effects.  Exit codes: 0 ok, 2 validation, 3 access,
4 not found, 5 transport.
"""

from __future__ import annotations

import json as jsonlib
import os
import sys
from pathlib import Path

import click

from .crate import validate_crate as validate_crate_archive
from .errors import (
    AccessDenied,
    AuthRequired,
    FetchError,
    FlowHubError,
    MintFailed,
    NotFoundError,
    RefNotFound,
    ValidationFailed,
)
from .model import validate_entry
from .registry import (
    CrateSpec,
    GitSpec,
    Registry,
    RegistryConfig,
    SearchQuery,
    Store,
    UploadSpec,
    load_config,
)
DEFAULT_STORE = "flowhub-store"


def exit_code_for(exc: Exception) -> int:
    if isinstance(exc, (AuthRequired, AccessDenied)):
        return 3
    if isinstance(exc, (NotFoundError, RefNotFound)):
        return 4
    if isinstance(exc, (FetchError, MintFailed, OSError)):
        return 5
    return 2  # validation and malformed input


def build_registry(config_path: str | None) -> Registry:
    path = config_path or os.environ.get("FLOWHUB_CONFIG")
    config = load_config(path) if path else RegistryConfig()
    store_dir = config.store_dir or os.environ.get("FLOWHUB_STORE") or DEFAULT_STORE
    config.store_dir = store_dir
    return Registry(Store(store_dir), config)


def resolve_actor(registry: Registry, actor_id: str | None):
    actor_id = actor_id or os.environ.get("FLOWHUB_ACTOR") or registry.config.cli_actor
    if not actor_id:
        raise AuthRequired("no actor: pass --actor, set FLOWHUB_ACTOR, or configure cli_actor")
    return registry.get_user(actor_id)


@click.group()
@click.option("--config", "config_path", envvar="FLOWHUB_CONFIG", default=None, help="Config file path.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def main(ctx, config_path, as_json):
    """Workflow registry command line."""
    ctx.obj = {"config_path": config_path, "json": as_json}


def _registry(ctx) -> Registry:
    return build_registry(ctx.obj["config_path"])


def _emit(ctx, payload: dict, lines: list[str]):
    if ctx.obj["json"]:
        click.echo(jsonlib.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        for line in lines:
            click.echo(line)


def _fail(exc: Exception):
    if isinstance(exc, FlowHubError):
        click.echo(f"{exc.code}: {exc.message}", err=True)
        if isinstance(exc, ValidationFailed):
            for finding in exc.report.errors:
                click.echo(f"error: {finding.code} {finding.message}", err=True)
    else:
        click.echo(str(exc), err=True)
    sys.exit(exit_code_for(exc))


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--config", "config_path", default=None, help="Config file path (overrides the global flag).")
@click.option("--ui", "ui_dir", default=None, help="Serve a built browser UI from this directory at /ui.")
@click.pass_context
def serve(ctx, port, host, config_path, ui_dir):
    """Run the HTTP API."""
    import uvicorn

    from .api import create_app

    registry = build_registry(config_path or ctx.obj["config_path"])
    app = create_app(registry)
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
    uvicorn.run(app, host=host, port=port)


def _source_for_path(path: str):
    if path.startswith(("http://", "https://")):
        return GitSpec(remote=path)
    target = Path(path)
    if not target.exists():
        raise NotFoundError(f"{path} does not exist")
    if target.is_dir():
        if (target / ".git").exists():
            return GitSpec(remote=str(target))
        files = {
            p.relative_to(target).as_posix(): p.read_bytes()
            for p in sorted(target.rglob("*"))
            if p.is_file()
        }
        main = _best_main(files)
        if main is None:
            from .errors import InvalidInput

            raise InvalidInput("no workflow file detected in the directory; pass --main")
        return UploadSpec(files=files, main_path=main)
    if target.suffix.lower() == ".zip":
        return CrateSpec(archive=target.read_bytes())
    return UploadSpec(files={target.name: target.read_bytes()}, main_path=target.name)


def _best_main(files: dict[str, bytes]) -> str | None:
    from .parsers import detect_class
    from .parsers.detect import MAX_PARSE_BYTES, OTHER_CLASS_ID

    candidates = []
    for path, content in files.items():
        if len(content) > MAX_PARSE_BYTES:
            continue
        if detect_class(path, content) != OTHER_CLASS_ID:
            candidates.append(path)
    candidates.sort(key=lambda p: (p.count("/"), p))
    return candidates[0] if candidates else None


@main.command()
@click.argument("path")
@click.option("--title", default=None)
@click.option("--team", "teams", multiple=True, help="Owning team id (repeatable).")
@click.option("--class", "workflow_class", default=None, help="Workflow class override.")
@click.option("--license", "license_id", default=None)
@click.option("--description", default=None)
@click.option("--main", "main_path", default=None, help="Main workflow path inside the source.")
@click.option("--ref", default=None, help="Git ref (branch or tag).")
@click.option("--actor", default=None, help="Acting user id.")
@click.pass_context
def register(ctx, path, title, teams, workflow_class, license_id, description, main_path, ref, actor):
    """Register a workflow from a file, directory, git URL, or crate zip."""
    try:
        registry = _registry(ctx)
        user = resolve_actor(registry, actor)
        source = _source_for_path(path)
        if isinstance(source, GitSpec) and ref:
            source.ref = ref
        overrides: dict = {}
        if title is not None:
            overrides["title"] = title
        if teams:
            overrides["team_ids"] = list(teams)
        if workflow_class:
            overrides["workflow_class"] = workflow_class
        if license_id:
            overrides["license"] = license_id
        if description is not None:
            overrides["description"] = description
        if main_path:
            overrides["main_workflow_path"] = main_path
        entry = registry.register_workflow(user, source, overrides)
        report = validate_entry(entry)
        lines = [f"id: {entry.id}", f"class: {entry.workflow_class}", f"version: 1"]
        lines += [f"warning: {f.code} {f.message}" for f in report.warnings]
        _emit(ctx, {"id": entry.id, "class": entry.workflow_class,
                    "warnings": [vars(f) for f in report.warnings]}, lines)
    except Exception as exc:  # noqa: BLE001 - single exit point maps codes
        _fail(exc)


@main.command()
@click.argument("entry_id")
@click.option("--actor", default=None)
@click.pass_context
def sync(ctx, entry_id, actor):
    """Create versions for new git releases of a git-sourced entry."""
    try:
        registry = _registry(ctx)
        user = resolve_actor(registry, actor)
        created = registry.sync_git_releases(user, entry_id)
        lines = [f"created: version {v.version} ({v.revision_comment})" for v in created] or [
            "created: nothing new"
        ]
        _emit(ctx, {"created": [v.version for v in created]}, lines)
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


@main.command(name="export-crate")
@click.argument("entry_id")
@click.option("--version", "version_number", type=int, default=None)
@click.option("-o", "--output", default=None, help="Output path (default <id>.crate.zip).")
@click.option("--actor", default=None)
@click.pass_context
def export_crate(ctx, entry_id, version_number, output, actor):
    """Export an entry version as a Workflow-RO-Crate zip."""
    try:
        registry = _registry(ctx)
        user = None
        if actor or os.environ.get("FLOWHUB_ACTOR") or registry.config.cli_actor:
            user = resolve_actor(registry, actor)
        archive = registry.export_crate(user, entry_id, version_number)
        target = Path(output or f"{entry_id}.crate.zip")
        target.write_bytes(archive)
        _emit(ctx, {"path": str(target), "bytes": len(archive)}, [f"wrote: {target} ({len(archive)} bytes)"])
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


@main.command(name="validate-crate")
@click.argument("crate_path")
@click.pass_context
def validate_crate(ctx, crate_path):
    """Check a crate zip against the packaging profile."""
    try:
        archive = Path(crate_path).read_bytes()
    except OSError as exc:
        _fail(exc)
        return
    report = validate_crate_archive(archive)
    lines = [report.level]
    lines += [f"{f.severity}: {f.code} {f.message}" for f in report.findings]
    _emit(ctx, {"level": report.level, "findings": [vars(f) for f in report.findings]}, lines)
    if report.level == "invalid":
        sys.exit(2)


@main.command()
@click.option("--q", default=None, help="Text query.")
@click.option("--facet", "facets", multiple=True, help="Facet filter k=v (repeatable).")
@click.option("--sort", default="updated", help="Sort key, optionally key:dir.")
@click.option("--page", default=1)
@click.option("--page-size", default=20)
@click.option("--actor", default=None)
@click.pass_context
def search(ctx, q, facets, sort, page, page_size, actor):
    """Search entries; rows are id, class, title."""
    try:
        registry = _registry(ctx)
        user = None
        if actor or os.environ.get("FLOWHUB_ACTOR") or registry.config.cli_actor:
            user = resolve_actor(registry, actor)
        filters: dict[str, set[str]] = {}
        for pair in facets:
            key, _, value = pair.partition("=")
            if not value:
                raise FlowHubError(f"facet filters look like k=v, got {pair!r}")
            filters.setdefault(key, set()).add(value)
        sort_key, _, sort_dir = sort.partition(":")
        query = SearchQuery(
            text=q,
            filters=filters,
            sort_key=sort_key,
            sort_dir=sort_dir or "desc",
            page=page,
            page_size=page_size,
        )
        result = registry.search(user, query)
        lines = [f"total: {result.total}"]
        for hit in result.hits:
            cls = registry.classes.get(hit.workflow_class)
            lines.append(f"{hit.id}\t{cls.display_name if cls else hit.workflow_class}\t{hit.title}")
        from .api.views import search_view

        _emit(ctx, search_view(result), lines)
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


@main.command(name="mint-doi")
@click.argument("entry_id")
@click.option("--version", "version_number", type=int, required=True)
@click.option("--actor", default=None)
@click.pass_context
def mint_doi(ctx, entry_id, version_number, actor):
    """Mint (or return the existing) DOI for a version; freezes it."""
    try:
        registry = _registry(ctx)
        user = resolve_actor(registry, actor)
        record = registry.mint_doi(user, entry_id, version_number)
        _emit(ctx, {"doi": record.doi, "version": record.version},
              [f"doi: {record.doi}"])
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


@main.group()
def admin():
    """Operator commands (run against the local store, no auth)."""


@admin.command(name="create-user")
@click.argument("display_name")
@click.option("--orcid", default=None)
@click.option("--site-admin", is_flag=True)
@click.pass_context
def create_user(ctx, display_name, orcid, site_admin):
    try:
        registry = _registry(ctx)
        user, api_key = registry.create_user(display_name, orcid=orcid, site_admin=site_admin)
        _emit(ctx, {"id": user.id, "api_key": api_key},
              [f"id: {user.id}", f"api_key: {api_key}"])
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


@admin.command(name="create-space")
@click.argument("name")
@click.option("--actor", required=True, help="A site-admin user id.")
@click.option("--description", default="")
@click.pass_context
def create_space(ctx, name, actor, description):
    try:
        registry = _registry(ctx)
        space = registry.create_space(resolve_actor(registry, actor), name, description)
        _emit(ctx, {"id": space.id}, [f"id: {space.id}"])
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


@admin.command(name="create-team")
@click.argument("name")
@click.option("--space", "space_id", default=None, help="Space id (default: Independent Teams).")
@click.option("--actor", required=True)
@click.option("--license", "default_license", default=None)
@click.pass_context
def create_team(ctx, name, space_id, actor, default_license):
    try:
        registry = _registry(ctx)
        user = resolve_actor(registry, actor)
        space = space_id or registry.default_space().id
        team = registry.create_team(user, name, space, default_license=default_license)
        _emit(ctx, {"id": team.id}, [f"id: {team.id}"])
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


@admin.command(name="create-org")
@click.argument("name")
@click.option("--country", default=None)
@click.pass_context
def create_org(ctx, name, country):
    try:
        registry = _registry(ctx)
        org = registry.create_organisation(name, country)
        _emit(ctx, {"id": org.id}, [f"id: {org.id}"])
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


@admin.command()
@click.argument("user_id")
@click.pass_context
def token(ctx, user_id):
    """Mint a bearer token for a user (operator shortcut)."""
    try:
        registry = _registry(ctx)
        value, expires = registry.issue_token_for(user_id)
        _emit(ctx, {"token": value, "expires_at": expires.isoformat()},
              [f"token: {value}", f"expires_at: {expires.isoformat()}"])
    except Exception as exc:  # noqa: BLE001
        _fail(exc)


if __name__ == "__main__":
    main()
