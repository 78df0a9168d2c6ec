"""Registry configuration.

Flat ``key = value`` file, ``#`` comments.  Launchers are declared with
dotted keys::

    doi_prefix = 10.77777
    base_url = https://hub.example.org
    launcher.galaxy.url = https://usegalaxy.eu/trs_import?id={trs_id}&v={version}
    launcher.galaxy.classes = galaxy
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..errors import InvalidInput


@dataclass
class Launcher:
    id: str
    url_template: str  # {trs_id}, {version}, {trs_endpoint}, {base_url} placeholders
    classes: tuple[str, ...] = ()  # empty = any workflow class

    def supports(self, class_id: str) -> bool:
        return not self.classes or class_id in self.classes


@dataclass
class RegistryConfig:
    doi_prefix: str = "10.77777"  # non-resolvable test prefix
    base_url: str = "http://localhost:8000"
    # storage cap per file; parsing has its own fixed 16 MiB limit, so
    # files between the two are stored but never parsed
    max_file_mb: int = 64
    embargo_hides_listing: bool = False
    store_dir: str | None = None  # None = in-memory
    registry_name: str = "FlowHub"
    token_ttl_hours: int = 24
    cli_actor: str | None = None
    launchers: dict[str, Launcher] = field(default_factory=dict)

    @property
    def max_file_bytes(self) -> int:
        return self.max_file_mb * 1024 * 1024


_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def load_config(path: str | Path) -> RegistryConfig:
    config = RegistryConfig()
    launcher_parts: dict[str, dict[str, str]] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidInput(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key.startswith("launcher."):
            _, launcher_id, attr = (key.split(".", 2) + [""])[:3]
            if not launcher_id or attr not in ("url", "classes"):
                raise InvalidInput(f"{path}:{lineno}: launcher keys are launcher.<id>.url|classes")
            launcher_parts.setdefault(launcher_id, {})[attr] = value
        elif key == "doi_prefix":
            config.doi_prefix = value
        elif key == "base_url":
            config.base_url = value.rstrip("/")
        elif key == "max_file_mb":
            config.max_file_mb = int(value)
        elif key == "embargo_hides_listing":
            config.embargo_hides_listing = _BOOL.get(value.lower(), False)
        elif key == "store_dir":
            config.store_dir = value
        elif key == "registry_name":
            config.registry_name = value
        elif key == "token_ttl_hours":
            config.token_ttl_hours = int(value)
        elif key == "cli_actor":
            config.cli_actor = value
        else:
            raise InvalidInput(f"{path}:{lineno}: unknown key {key!r}")
    for launcher_id, parts in launcher_parts.items():
        if "url" not in parts:
            raise InvalidInput(f"launcher {launcher_id!r} has no url template")
        classes = tuple(c.strip() for c in parts.get("classes", "").split(",") if c.strip())
        config.launchers[launcher_id] = Launcher(launcher_id, parts["url"], classes)
    return config
