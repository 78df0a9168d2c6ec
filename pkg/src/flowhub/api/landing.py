"""Human landing pages with machine-readable hooks.

Each page embeds the entry's structured metadata as JSON-LD and carries
typed Link headers (cite-as, describedby, item, author) so agents can
navigate from the page to metadata, content, and people.
"""

from __future__ import annotations

import html
import json
from urllib.parse import quote

from fastapi import APIRouter, Depends
from fastapi.responses import HTMLResponse, RedirectResponse

from ..errors import NotFoundError
from ..model import Right, User, WorkflowEntry
from ..registry import Registry
from .deps import entry_for, get_actor, get_registry

router = APIRouter()


def signposting_links(registry: Registry, entry: WorkflowEntry, version_number: int) -> str:
    base = registry.config.base_url
    doi = entry.doi_records.get(version_number)
    cite_target = f"https://doi.org/{doi}" if doi else f"{base}/workflows/{entry.id}"
    links = [
        f'<{cite_target}>; rel="cite-as"',
        f'<{base}/workflows/{entry.id}>; rel="describedby"; type="application/json"',
        f'<{base}/workflows/{entry.id}/ro_crate?version={version_number}>; rel="item"; type="application/zip"',
    ]
    for creator in entry.creators:
        if creator.orcid:
            links.append(f'<https://orcid.org/{creator.orcid}>; rel="author"')
    return ", ".join(links)


@router.get("/workflows/{entry_id}/landing", response_class=HTMLResponse)
def landing_page(
    entry_id: str,
    version: int | None = None,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    entry = entry_for(registry, actor, entry_id, Right.VIEW)
    resolved = entry.get_version(version) if version is not None else entry.head()
    if resolved is None:
        raise NotFoundError(f"version {version} of {entry_id} does not exist")
    registry.record_activity(entry_id, "view")
    entry = registry.get_entry(entry_id)  # re-read with the fresh view count

    jsonld = registry.bioschemas_for(entry, resolved)
    creators = ", ".join(html.escape(c.name) for c in entry.creators) or "(no creators listed)"
    cls = registry.classes.get(entry.workflow_class)
    body = f"""<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>{html.escape(entry.title)}</title>
<script type="application/ld+json">
{json.dumps(jsonld, indent=2, sort_keys=True)}
</script>
</head>
<body>
<main>
  <p class="class-badge">{html.escape(cls.display_name if cls else entry.workflow_class)}</p>
  <h1>{html.escape(entry.title)}</h1>
  <p class="maturity">{html.escape(entry.maturity.value)}</p>
  <p class="creators">{creators}</p>
  <section class="description">{html.escape(entry.description)}</section>
  <p class="metrics">{entry.metrics.views} views, {entry.metrics.downloads} downloads</p>
  <p><a href="{registry.config.base_url}/workflows/{entry.id}/ro_crate?version={resolved.version}">Download RO-Crate</a></p>
</main>
</body>
</html>
"""
    return HTMLResponse(
        content=body,
        headers={"Link": signposting_links(registry, entry, resolved.version)},
    )


@router.get("/workflows/{entry_id}/launch/{launcher_id}")
def launch_redirect(
    entry_id: str,
    launcher_id: str,
    version: int | None = None,
    registry: Registry = Depends(get_registry),
    actor: User | None = Depends(get_actor),
):
    entry = entry_for(registry, actor, entry_id, Right.VIEW)
    launcher = registry.config.launchers.get(launcher_id)
    if launcher is None or not launcher.supports(entry.workflow_class):
        raise NotFoundError(f"no launcher {launcher_id!r} for this entry")
    resolved = entry.get_version(version) if version is not None else entry.head()
    if resolved is None:
        raise NotFoundError(f"version {version} of {entry_id} does not exist")
    url = launcher.url_template.format(
        trs_id=quote(f"#workflow/{entry.id}", safe=""),
        version=resolved.version,
        trs_endpoint=f"{registry.config.base_url}/ga4gh/trs/v2",
        base_url=registry.config.base_url,
    )
    return RedirectResponse(url, status_code=302)
