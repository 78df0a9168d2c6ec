"""Request-scoped helpers shared by the routers."""

from __future__ import annotations

from fastapi import Request

from ..errors import AccessDenied, AuthRequired, NotFoundError
from ..model import Right, User, WorkflowEntry
from ..registry import Registry


def get_registry(request: Request) -> Registry:
    return request.app.state.registry


def get_actor(request: Request) -> User | None:
    header = request.headers.get("authorization")
    if not header:
        return None
    scheme, _, token = header.partition(" ")
    if scheme.lower() != "bearer" or not token.strip():
        raise AuthRequired("expected a bearer token")
    user = get_registry(request).resolve_token(token.strip())
    if user is None:
        raise AuthRequired("invalid or expired token")
    return user


def require_actor(request: Request) -> User:
    actor = get_actor(request)
    if actor is None:
        raise AuthRequired("this endpoint requires authentication")
    return actor


def entry_for(
    registry: Registry, actor: User | None, entry_id: str, right: Right
) -> WorkflowEntry:
    """Access-checked entry load with the 404-for-anonymous rule."""
    try:
        return registry.entry_for(actor, entry_id, right)
    except AccessDenied:
        if actor is None:
            raise NotFoundError(f"workflow {entry_id!r} does not exist") from None
        raise
