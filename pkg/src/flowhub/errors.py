"""Exception types shared across the registry.

Every error carries a stable machine-readable ``code`` so the HTTP layer
and the CLI can map failures without matching on message strings.
"""

from __future__ import annotations


class FlowHubError(Exception):
    code = "error"

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.context = context


class AuthRequired(FlowHubError):
    code = "auth_required"


class AccessDenied(FlowHubError):
    code = "access_denied"


class NotFoundError(FlowHubError):
    code = "not_found"


class IntegrityError(FlowHubError):
    code = "integrity_error"


class InvalidInput(FlowHubError):
    code = "invalid_input"


class BadQuery(FlowHubError):
    code = "bad_query"


class Conflict(FlowHubError):
    code = "conflict"


class DuplicateItem(Conflict):
    code = "duplicate_item"


class FrozenVersion(Conflict):
    code = "frozen_version"


class VisibilityRequired(Conflict):
    code = "visibility_required"


class AttributionCycle(FlowHubError):
    code = "attribution_cycle"


class ValidationFailed(FlowHubError):
    """Raised when an entry fails metadata validation; carries the report."""

    code = "validation_failed"

    def __init__(self, report, message: str = "metadata validation failed"):
        super().__init__(message)
        self.report = report


class MintFailed(FlowHubError):
    code = "mint_failed"


class SizeLimit(FlowHubError):
    code = "size_limit"


class ParseError(FlowHubError):
    code = "parse_error"

    def __init__(self, message: str = "", line: int | None = None, column: int | None = None):
        super().__init__(message, line=line, column=column)
        self.line = line
        self.column = column


class SchemaError(FlowHubError):
    code = "schema_error"


class NotAWorkflow(FlowHubError):
    code = "not_a_workflow"


class InvalidStructure(FlowHubError):
    code = "invalid_structure"


class NotACrate(FlowHubError):
    code = "not_a_crate"


class InvalidCrate(FlowHubError):
    code = "invalid_crate"


class CrateBuildError(FlowHubError):
    code = "crate_build_error"


class FetchError(FlowHubError):
    code = "fetch_error"


class RefNotFound(FlowHubError):
    code = "ref_not_found"
