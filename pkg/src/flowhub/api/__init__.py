"""HTTP surface: native JSON API, GA4GH TRS, landing pages, launch."""

from .app import create_app

__all__ = ["create_app"]
