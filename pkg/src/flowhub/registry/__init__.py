"""Registry core: persistence, registration pipelines, versioning, DOIs,
collections, notifications, and search."""

from .config import Launcher, RegistryConfig, load_config
from .core import CrateSpec, GitSpec, Registry, UploadSpec
from .doi import DoiRecord, RecordingDoiClient
from .search import SearchQuery, SearchResult
from .store import Store

__all__ = [
    "CrateSpec",
    "DoiRecord",
    "GitSpec",
    "Launcher",
    "RecordingDoiClient",
    "Registry",
    "RegistryConfig",
    "SearchQuery",
    "SearchResult",
    "Store",
    "UploadSpec",
    "load_config",
]
