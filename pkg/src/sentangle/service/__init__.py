"""HTTP service exposing spaces, verb stores, composition and tasks."""

from .app import app, create_app

__all__ = ["app", "create_app"]
