"""Service configuration: one JSON file, overridable per-field through
SWIPELABEL_* environment variables."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

ENV_PREFIX = "SWIPELABEL_"
DEFAULT_UPLOAD_CAP = 2 * 1024 ** 3  # 2 GiB


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    database_path: str = "swipelabel.db"
    blob_store_path: str = "blobs"
    upload_cap_bytes: int = DEFAULT_UPLOAD_CAP
    static_dir: str | None = None        # swipe-ui bundle served at /
    token_ttl_hours: int = 24
    admin_user: str = "admin"
    admin_password: str | None = None    # generated and logged when unset

    @classmethod
    def load(cls, path: str | Path | None = None) -> "ServiceConfig":
        """Read the config file (if any), then apply environment overrides."""
        values: dict = {}
        if path is None:
            path = os.environ.get(ENV_PREFIX + "CONFIG")
        if path is not None:
            values.update(json.loads(Path(path).read_text("utf-8")))
        config = cls(**values)
        for f in fields(cls):
            raw = os.environ.get(ENV_PREFIX + f.name.upper())
            if raw is None:
                continue
            if f.type in ("int", int):
                setattr(config, f.name, int(raw))
            else:
                setattr(config, f.name, raw)
        return config
