"""Persistence: an embedded SQLite store for entities plus the append-only
annotation event log, and a content-addressed blob store for image bytes.

The events table has exactly two access paths, append and select. Nothing
updates or deletes a row; session state is always a fold over the log.
"""

from __future__ import annotations

import hashlib
import json
import secrets
import sqlite3
import threading
from datetime import datetime, timedelta, timezone
from pathlib import Path

from ..ingestion import Dataset, ImageFormat, ImagePatch
from ..model import (
    DirectionAction,
    DirectionMapping,
    DisplayOptions,
    StudyConfig,
    StudyMode,
    SwipeDirection,
)
from ..session import SessionEvent
from ..timefmt import format_utc_ms, parse_utc_ms
from .. import errors

_SCHEMA = """
CREATE TABLE IF NOT EXISTS users (
    user_id TEXT PRIMARY KEY,
    display_name TEXT NOT NULL,
    role TEXT NOT NULL,
    pw_salt BLOB NOT NULL,
    pw_hash BLOB NOT NULL,
    group_ids TEXT NOT NULL DEFAULT '[]'
);
CREATE TABLE IF NOT EXISTS groups (
    group_id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    members TEXT NOT NULL DEFAULT '[]'
);
CREATE TABLE IF NOT EXISTS datasets (
    dataset_id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    created_at TEXT NOT NULL,
    patches TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS studies (
    study_id TEXT PRIMARY KEY,
    config TEXT NOT NULL,
    status TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS events (
    event_id INTEGER PRIMARY KEY AUTOINCREMENT,
    study_id TEXT NOT NULL,
    participant_id TEXT NOT NULL,
    kind TEXT NOT NULL,
    payload TEXT NOT NULL,
    recorded_at TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_events_session ON events (study_id, participant_id, event_id);
CREATE TABLE IF NOT EXISTS tokens (
    token TEXT PRIMARY KEY,
    user_id TEXT NOT NULL,
    expires_at TEXT NOT NULL
);
"""

_PBKDF2_ITERATIONS = 100_000


def hash_password(password: str, salt: bytes) -> bytes:
    return hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt,
                               _PBKDF2_ITERATIONS)


# --- study config JSON schema -------------------------------------------------

def mapping_to_json(mapping: DirectionMapping) -> dict:
    out = {}
    for direction, action in mapping.entries.items():
        entry = {"action": action.kind.value}
        if action.class_name is not None:
            entry["class_name"] = action.class_name
        out[direction.value] = entry
    return out


def mapping_from_json(doc: dict) -> DirectionMapping:
    entries = {}
    for key, entry in doc.items():
        direction = SwipeDirection(key)
        kind = entry["action"]
        if kind == "label":
            entries[direction] = DirectionAction.label(entry["class_name"])
        elif kind == "postpone":
            entries[direction] = DirectionAction.postpone()
        elif kind == "unassigned":
            continue
        else:
            raise ValueError(f"unknown action {kind!r}")
    return DirectionMapping(entries)


def config_to_json(config: StudyConfig) -> dict:
    return {
        "study_id": config.study_id,
        "dataset_id": config.dataset_id,
        "mapping": mapping_to_json(config.mapping),
        "mode": config.mode.value,
        "display": {
            "scale_percent": config.display.scale_percent,
            "interpolation_enabled": config.display.interpolation_enabled,
        },
        "participants": sorted(config.assigned_participants),
    }


def config_from_json(doc: dict) -> StudyConfig:
    display = doc.get("display", {})
    return StudyConfig(
        study_id=doc["study_id"],
        dataset_id=doc["dataset_id"],
        mapping=mapping_from_json(doc.get("mapping", {})) if doc.get("mapping")
        else DirectionMapping.default(),
        mode=StudyMode(doc.get("mode", "annotation")),
        display=DisplayOptions(
            scale_percent=int(display.get("scale_percent", 100)),
            interpolation_enabled=bool(display.get("interpolation_enabled", False)),
        ),
        assigned_participants=frozenset(doc.get("participants", ())),
    )


def _patch_to_json(patch: ImagePatch) -> dict:
    return {
        "patch_id": patch.patch_id,
        "filename": patch.filename,
        "width": patch.width,
        "height": patch.height,
        "format": patch.format.value,
        "content_hash": patch.content_hash,
        "ground_truth": patch.ground_truth,
    }


def _patch_from_json(doc: dict) -> ImagePatch:
    return ImagePatch(
        patch_id=doc["patch_id"],
        filename=doc["filename"],
        width=doc["width"],
        height=doc["height"],
        format=ImageFormat(doc["format"]),
        content_hash=doc["content_hash"],
        ground_truth=doc.get("ground_truth"),
    )


class BlobStore:
    """Content-addressed file store keyed by SHA-256 of the content."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def put(self, content: bytes) -> str:
        digest = hashlib.sha256(content).hexdigest()
        path = self.root / f"sha256-{digest}"
        if not path.exists():
            path.write_bytes(content)
        return digest

    def get(self, digest: str) -> bytes:
        path = self.root / f"sha256-{digest}"
        if not path.exists():
            raise KeyError(digest)
        return path.read_bytes()


class Store:
    """SQLite-backed entity store plus append-only event log.

    A single connection guarded by one lock keeps SQLite happy under the
    service's thread pool; per-session write ordering is enforced one level
    up by the API layer's session locks.
    """

    def __init__(self, db_path: str | Path, blob_dir: str | Path):
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(str(db_path), check_same_thread=False)
        self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.executescript(_SCHEMA)
        self._conn.commit()
        self.blobs = BlobStore(blob_dir)

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # -- users and groups --------------------------------------------------

    def create_user(self, user_id: str, display_name: str, role: str,
                    password: str, group_ids: list[str] | None = None) -> None:
        salt = secrets.token_bytes(16)
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO users VALUES (?, ?, ?, ?, ?, ?)",
                (user_id, display_name, role, salt,
                 hash_password(password, salt), json.dumps(group_ids or [])))
            self._conn.commit()

    def get_user(self, user_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT user_id, display_name, role, group_ids FROM users "
                "WHERE user_id = ?", (user_id,)).fetchone()
        if row is None:
            return None
        return {"user_id": row[0], "display_name": row[1], "role": row[2],
                "group_ids": json.loads(row[3])}

    def verify_password(self, user_id: str, password: str) -> bool:
        with self._lock:
            row = self._conn.execute(
                "SELECT pw_salt, pw_hash FROM users WHERE user_id = ?",
                (user_id,)).fetchone()
        if row is None:
            return False
        return secrets.compare_digest(hash_password(password, row[0]), row[1])

    def has_admin(self) -> bool:
        with self._lock:
            row = self._conn.execute(
                "SELECT COUNT(*) FROM users WHERE role = 'admin'").fetchone()
        return row[0] > 0

    def create_group(self, group_id: str, name: str,
                     members: list[str] | None = None) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO groups VALUES (?, ?, ?)",
                (group_id, name, json.dumps(members or [])))
            self._conn.commit()

    def get_group(self, group_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT group_id, name, members FROM groups WHERE group_id = ?",
                (group_id,)).fetchone()
        if row is None:
            return None
        return {"group_id": row[0], "name": row[1], "members": json.loads(row[2])}

    # -- tokens --------------------------------------------------------------

    def issue_token(self, user_id: str, ttl: timedelta) -> str:
        token = secrets.token_hex(32)
        expires = datetime.now(timezone.utc) + ttl
        with self._lock:
            self._conn.execute("INSERT INTO tokens VALUES (?, ?, ?)",
                               (token, user_id, format_utc_ms(expires)))
            self._conn.commit()
        return token

    def resolve_token(self, token: str) -> dict:
        """User record for a live token; raises InvalidCredentials for
        unknown or expired tokens."""
        with self._lock:
            row = self._conn.execute(
                "SELECT user_id, expires_at FROM tokens WHERE token = ?",
                (token,)).fetchone()
        if row is None:
            raise errors.InvalidCredentials("unknown token")
        if parse_utc_ms(row[1]) < datetime.now(timezone.utc):
            raise errors.InvalidCredentials("token expired")
        user = self.get_user(row[0])
        if user is None:
            raise errors.InvalidCredentials("token user no longer exists")
        return user

    # -- datasets --------------------------------------------------------------

    def save_dataset(self, dataset: Dataset) -> None:
        doc = json.dumps([_patch_to_json(p) for p in dataset.patches])
        with self._lock:
            self._conn.execute(
                "INSERT INTO datasets VALUES (?, ?, ?, ?)",
                (dataset.dataset_id, dataset.name,
                 format_utc_ms(dataset.created_at), doc))
            self._conn.commit()

    def get_dataset(self, dataset_id: str) -> Dataset:
        with self._lock:
            row = self._conn.execute(
                "SELECT dataset_id, name, created_at, patches FROM datasets "
                "WHERE dataset_id = ?", (dataset_id,)).fetchone()
        if row is None:
            raise errors.DatasetNotFound(f"no dataset {dataset_id!r}")
        patches = tuple(_patch_from_json(d) for d in json.loads(row[3]))
        return Dataset(dataset_id=row[0], name=row[1],
                       patches=patches, created_at=parse_utc_ms(row[2]))

    # -- studies -----------------------------------------------------------------

    def save_study(self, config: StudyConfig, status: str = "draft") -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO studies VALUES (?, ?, ?, ?)",
                (config.study_id, json.dumps(config_to_json(config)), status,
                 format_utc_ms(datetime.now(timezone.utc))))
            self._conn.commit()

    def get_study(self, study_id: str) -> tuple[StudyConfig, str]:
        with self._lock:
            row = self._conn.execute(
                "SELECT config, status FROM studies WHERE study_id = ?",
                (study_id,)).fetchone()
        if row is None:
            raise errors.StudyNotFound(f"no study {study_id!r}")
        return config_from_json(json.loads(row[0])), row[1]

    def set_study_status(self, study_id: str, status: str) -> None:
        self.get_study(study_id)
        with self._lock:
            self._conn.execute("UPDATE studies SET status = ? WHERE study_id = ?",
                               (status, study_id))
            self._conn.commit()

    def study_exists(self, study_id: str) -> bool:
        with self._lock:
            row = self._conn.execute(
                "SELECT 1 FROM studies WHERE study_id = ?", (study_id,)).fetchone()
        return row is not None

    def list_studies(self) -> list[tuple[StudyConfig, str]]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT config, status FROM studies ORDER BY study_id").fetchall()
        return [(config_from_json(json.loads(c)), s) for c, s in rows]

    # -- event log (append + select only) ------------------------------------------

    def append_events(self, study_id: str, participant_id: str,
                      events: list[SessionEvent]) -> None:
        now = format_utc_ms(datetime.now(timezone.utc))
        with self._lock:
            self._conn.executemany(
                "INSERT INTO events (study_id, participant_id, kind, payload, "
                "recorded_at) VALUES (?, ?, ?, ?, ?)",
                [(study_id, participant_id, e.kind, json.dumps(e.payload), now)
                 for e in events])
            self._conn.commit()

    def events_for_session(self, study_id: str, participant_id: str
                           ) -> list[SessionEvent]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT kind, payload FROM events WHERE study_id = ? AND "
                "participant_id = ? ORDER BY event_id", (study_id, participant_id)
            ).fetchall()
        return [SessionEvent(kind, json.loads(payload)) for kind, payload in rows]

    def event_log_snapshot(self, study_id: str | None = None) -> list[tuple]:
        """Full raw log rows, for audit tests and debugging."""
        query = ("SELECT event_id, study_id, participant_id, kind, payload "
                 "FROM events")
        args: tuple = ()
        if study_id is not None:
            query += " WHERE study_id = ?"
            args = (study_id,)
        with self._lock:
            return self._conn.execute(query + " ORDER BY event_id", args).fetchall()
