"""HTTP service: persistence, auth, API endpoints, CSV export, admin CLI."""

from .app import create_app
from .config import ServiceConfig
from .export import build_session, export_csv
from .reporting import study_report
from .storage import BlobStore, Store

__all__ = ["BlobStore", "ServiceConfig", "Store", "build_session",
           "create_app", "export_csv", "study_report"]
