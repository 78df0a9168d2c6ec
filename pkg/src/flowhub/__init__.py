"""flowhub: a registry for computational workflows.

Teams own workflow entries, Spaces administer Teams, and credit cascades
from an entry to the people and organisations behind it.  Entries are
registered by direct upload, by importing a Workflow-RO-Crate, or from a
Git repository; every entry is exportable as an RO-Crate and discoverable
through a GA4GH Tool Registry Service API.
"""

__version__ = "0.1.0"
