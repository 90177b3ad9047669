"""HTTP API: authentication, study management, annotation traffic, CSV
export, and agreement reports.

All endpoints are synchronous and run on the framework's thread pool; a
per-(study, participant) lock serializes session writes, so two racing
submissions for one session resolve to exactly one success and one conflict.
Errors leave the service as ``{"code": ..., "message": ...}`` bodies.
"""

from __future__ import annotations

import logging
import secrets
import threading
from collections import defaultdict
from datetime import timedelta
from pathlib import Path

from fastapi import Depends, FastAPI, Form, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .. import errors
from ..ingestion import ArchiveFormat, ingest_archive
from ..model import DeviceType, StudyMode, SwipeDirection, validate_config
from ..report import render_text_report, report_to_json
from .config import ServiceConfig
from .export import build_session, export_csv
from .reporting import study_report
from .storage import Store, config_from_json

logger = logging.getLogger("swipelabel.service")

_STATUS_BY_ERROR = {
    errors.InvalidCredentials: 401,
    errors.Forbidden: 403,
    errors.NotAssigned: 403,
    errors.StudyNotFound: 404,
    errors.DatasetNotFound: 404,
    errors.UnassignedDirection: 422,
    errors.PostponeNotConfigured: 422,
    errors.InvalidStudyConfig: 422,
    errors.InvalidCount: 422,
    errors.NoOutstandingPresentation: 409,
    errors.NothingToUndo: 409,
    errors.UndoDisabled: 409,
    errors.StudyClosed: 409,
    errors.SessionClosed: 409,
    errors.IncompleteMatrix: 409,
    errors.SingleRater: 422,
    errors.EmptyInput: 422,
}


class LoginRequest(BaseModel):
    user_id: str
    password: str


class AnnotationRequest(BaseModel):
    direction: str | None = None
    postpone: bool = False
    client_duration_ms: int | None = None
    device_type: str = "unknown"


class GroupRequest(BaseModel):
    group_id: str
    name: str
    members: list[str] = []


class UserRequest(BaseModel):
    user_id: str
    display_name: str = ""
    password: str
    role: str = "participant"
    group_ids: list[str] = []


class StudyCreateRequest(BaseModel):
    """Study configuration document (POST /api/admin/studies).

    ``mapping`` maps direction names to actions, e.g.::

        {"left":  {"action": "label", "class_name": "normal"},
         "right": {"action": "label", "class_name": "atypical"},
         "up":    {"action": "postpone"}}

    Directions omitted (or marked ``{"action": "unassigned"}``) reject
    gestures. Up to four label directions, distinct non-empty class names,
    at most one postpone. An empty mapping selects the two-class default
    shown above. ``display`` is ``{"scale_percent": 10..100,
    "interpolation_enabled": bool}``. ``mode`` "training" requires the
    dataset to carry a ground-truth label for every patch, each drawn from
    the mapping's class set.
    """

    study_id: str
    dataset_id: str
    mapping: dict
    mode: str = "annotation"
    display: dict = {}
    participants: list[str] = []


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.load()
    store = Store(config.database_path, config.blob_store_path)
    _bootstrap_admin(store, config)

    app = FastAPI(title="swipelabel", version="0.1.0")
    app.state.config = config
    app.state.store = store
    app.state.session_locks = defaultdict(threading.Lock)
    app.state.registry_lock = threading.Lock()

    @app.exception_handler(errors.SwipeLabelError)
    def handle_package_error(_request: Request, exc: errors.SwipeLabelError):
        status = _STATUS_BY_ERROR.get(type(exc), 400)
        return JSONResponse(status_code=status,
                            content={"code": exc.code, "message": str(exc)})

    @app.exception_handler(RequestValidationError)
    def handle_validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422,
                            content={"code": "validation_error", "message": str(exc)})

    def session_lock(study_id: str, participant_id: str) -> threading.Lock:
        with app.state.registry_lock:
            return app.state.session_locks[(study_id, participant_id)]

    # -- auth ----------------------------------------------------------------

    def current_user(request: Request) -> dict:
        header = request.headers.get("Authorization", "")
        if not header.startswith("Bearer "):
            raise errors.InvalidCredentials("missing bearer token")
        return store.resolve_token(header[len("Bearer "):])

    def admin_user(user: dict = Depends(current_user)) -> dict:
        if user["role"] != "admin":
            raise errors.Forbidden("admin role required")
        return user

    @app.post("/api/auth/login")
    def login(body: LoginRequest):
        if not store.verify_password(body.user_id, body.password):
            raise errors.InvalidCredentials("unknown user or wrong password")
        user = store.get_user(body.user_id)
        token = store.issue_token(
            body.user_id, timedelta(hours=config.token_ttl_hours))
        return {"token": token, "user_id": user["user_id"],
                "display_name": user["display_name"], "role": user["role"]}

    # -- participant endpoints --------------------------------------------------

    def assigned_study(study_id: str, user: dict):
        study_config, status = store.get_study(study_id)
        if user["user_id"] not in study_config.assigned_participants:
            raise errors.NotAssigned(
                f"user {user['user_id']!r} is not assigned to study {study_id!r}")
        if status != "open":
            raise errors.StudyClosed(f"study {study_id!r} is not open")
        return study_config

    def study_payload(study_config, status, session):
        from .storage import mapping_to_json
        return {
            "study_id": study_config.study_id,
            "dataset_id": study_config.dataset_id,
            "mode": study_config.mode.value,
            "status": status,
            "mapping": mapping_to_json(study_config.mapping),
            "display": {
                "scale_percent": study_config.display.scale_percent,
                "interpolation_enabled": study_config.display.interpolation_enabled,
            },
            "progress": session.progress(),
            "first_visit": len(session.events) == 0,
        }

    @app.get("/api/studies")
    def list_assigned_studies(user: dict = Depends(current_user)):
        out = []
        for study_config, status in store.list_studies():
            if user["user_id"] not in study_config.assigned_participants:
                continue
            if status == "draft":
                continue
            session = build_session(store, study_config.study_id, user["user_id"])
            out.append(study_payload(study_config, status, session))
        return {"studies": out}

    @app.get("/api/studies/{study_id}/next")
    def next_item(study_id: str, user: dict = Depends(current_user)):
        assigned_study(study_id, user)
        with session_lock(study_id, user["user_id"]):
            session = build_session(store, study_id, user["user_id"])
            known = len(session.events)
            presented = session.next_item()
            store.append_events(study_id, user["user_id"], session.events[known:])
        if presented is None:
            return {"done": True, "progress": session.progress()}
        config_obj, _ = store.get_study(study_id)
        dataset = store.get_dataset(config_obj.dataset_id)
        patch = dataset.patches[presented.patch_index]
        return {
            "done": False,
            "patch": {
                "patch_id": patch.patch_id,
                "filename": patch.filename,
                "width": patch.width,
                "height": patch.height,
                "image_url": f"/api/studies/{study_id}/image/{patch.patch_id}",
            },
            "presentation_index": presented.presentation_index,
            "progress": session.progress(),
        }

    @app.post("/api/studies/{study_id}/annotations")
    def submit_annotation(study_id: str, body: AnnotationRequest,
                          user: dict = Depends(current_user)):
        assigned_study(study_id, user)
        try:
            device = DeviceType(body.device_type)
        except ValueError:
            device = DeviceType.UNKNOWN
        if not body.postpone:
            if body.direction is None:
                raise errors.UnassignedDirection(
                    "a direction or postpone=true is required")
            try:
                direction = SwipeDirection(body.direction)
            except ValueError:
                raise errors.UnassignedDirection(
                    f"unknown direction {body.direction!r}") from None
        with session_lock(study_id, user["user_id"]):
            session = build_session(store, study_id, user["user_id"])
            known = len(session.events)
            if body.postpone:
                result = session.request_postpone(
                    client_duration_ms=body.client_duration_ms, device_type=device)
            else:
                result = session.submit(
                    direction,
                    client_duration_ms=body.client_duration_ms,
                    device_type=device)
            store.append_events(study_id, user["user_id"], session.events[known:])
        record = result.record
        response = {
            "patch_id": record.patch_id,
            "action": record.action.kind.value,
            "class_label": record.action.class_name,
            "postpone_count": record.postpone_count,
            "progress": session.progress(),
        }
        if result.reveal is not None:
            response["reveal"] = {"true_label": result.reveal,
                                  "was_correct": record.training_correct}
        return response

    @app.post("/api/studies/{study_id}/undo")
    def undo(study_id: str, user: dict = Depends(current_user)):
        assigned_study(study_id, user)
        with session_lock(study_id, user["user_id"]):
            session = build_session(store, study_id, user["user_id"])
            known = len(session.events)
            patch_index = session.undo()
            store.append_events(study_id, user["user_id"], session.events[known:])
        return {"restored_patch_id": session.patch_id_for(patch_index),
                "progress": session.progress()}

    @app.get("/api/studies/{study_id}/progress")
    def progress(study_id: str, user: dict = Depends(current_user)):
        assigned_study(study_id, user)
        session = build_session(store, study_id, user["user_id"])
        return {"progress": session.progress(),
                "first_visit": len(session.events) == 0}

    @app.get("/api/studies/{study_id}/image/{patch_id}")
    def patch_image(study_id: str, patch_id: str,
                    user: dict = Depends(current_user)):
        study_config, _status = store.get_study(study_id)
        if (user["role"] != "admin"
                and user["user_id"] not in study_config.assigned_participants):
            raise errors.NotAssigned("not assigned to this study")
        dataset = store.get_dataset(study_config.dataset_id)
        try:
            patch = dataset.patch_by_id(patch_id)
        except KeyError:
            raise errors.DatasetNotFound(f"no patch {patch_id!r}") from None
        content = store.blobs.get(patch.content_hash)
        media = "image/png" if patch.format.value == "png" else "image/jpeg"
        return Response(content=content, media_type=media)

    # -- admin endpoints -----------------------------------------------------------

    @app.post("/api/admin/groups")
    def create_group(body: GroupRequest, _admin: dict = Depends(admin_user)):
        store.create_group(body.group_id, body.name, body.members)
        return {"group_id": body.group_id, "members": body.members}

    @app.post("/api/admin/users")
    def create_user(body: UserRequest, _admin: dict = Depends(admin_user)):
        if body.role not in ("admin", "participant"):
            raise errors.InvalidStudyConfig([f"unknown role {body.role!r}"])
        store.create_user(body.user_id, body.display_name, body.role,
                          body.password, body.group_ids)
        return {"user_id": body.user_id, "role": body.role}

    @app.post("/api/admin/datasets")
    def upload_dataset(file: UploadFile, _admin: dict = Depends(admin_user),
                       name: str = Form(None), format: str = Form(None),
                       manifest: UploadFile | None = None):
        archive = _read_capped(file, config.upload_cap_bytes)
        declared = _declared_format(format, file.filename)
        manifest_bytes = manifest.file.read() if manifest is not None else None
        result = ingest_archive(archive, declared,
                                name or (file.filename or "dataset"),
                                manifest=manifest_bytes)
        for patch in result.dataset.patches:
            store.blobs.put(result.contents[patch.filename])
        store.save_dataset(result.dataset)
        return {
            "dataset_id": result.dataset.dataset_id,
            "name": result.dataset.name,
            "patch_count": len(result.dataset.patches),
            "warnings": result.warnings,
        }

    @app.post("/api/admin/studies")
    def create_study(body: StudyCreateRequest, _admin: dict = Depends(admin_user)):
        if store.study_exists(body.study_id):
            raise errors.InvalidStudyConfig(
                [f"study {body.study_id!r} already exists"])
        study_config = config_from_json(body.model_dump())
        dataset = store.get_dataset(study_config.dataset_id)
        violations = validate_config(study_config, dataset=dataset)
        if violations:
            raise errors.InvalidStudyConfig(violations)
        store.save_study(study_config, status="draft")
        return {"study_id": body.study_id, "status": "draft"}

    @app.post("/api/admin/studies/{study_id}/open")
    def open_study(study_id: str, _admin: dict = Depends(admin_user)):
        study_config, _status = store.get_study(study_id)
        dataset = store.get_dataset(study_config.dataset_id)
        violations = validate_config(study_config, dataset=dataset, for_open=True)
        violations += [
            f"assigned participant {pid!r} does not exist"
            for pid in sorted(study_config.assigned_participants)
            if store.get_user(pid) is None
        ]
        if violations:
            raise errors.InvalidStudyConfig(violations)
        store.set_study_status(study_id, "open")
        return {"study_id": study_id, "status": "open"}

    @app.post("/api/admin/studies/{study_id}/close")
    def close_study(study_id: str, _admin: dict = Depends(admin_user)):
        store.get_study(study_id)
        store.set_study_status(study_id, "closed")
        return {"study_id": study_id, "status": "closed"}

    @app.get("/api/admin/studies/{study_id}/export.csv")
    def export_study(study_id: str, include_history: bool = False,
                     _admin: dict = Depends(admin_user)):
        content, warnings = export_csv(store, study_id,
                                       include_history=include_history)
        headers = {
            "Content-Disposition": f'attachment; filename="{study_id}.csv"'}
        if warnings:
            headers["X-Warning"] = "; ".join(warnings)
        return Response(content=content, media_type="text/csv", headers=headers)

    @app.get("/api/admin/studies/{study_id}/report")
    def report(study_id: str, format: str = "json",
               _admin: dict = Depends(admin_user)):
        result = study_report(store, study_id)
        if format == "text":
            return Response(content=render_text_report(result),
                            media_type="text/plain")
        return report_to_json(result)

    if config.static_dir and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True),
                  name="ui")

    return app


def _bootstrap_admin(store: Store, config: ServiceConfig) -> None:
    if config.admin_password is not None:
        store.create_user(config.admin_user, "Administrator", "admin",
                          config.admin_password)
    elif not store.has_admin():
        password = secrets.token_urlsafe(12)
        store.create_user(config.admin_user, "Administrator", "admin", password)
        logger.warning("created admin user %r with password %s",
                       config.admin_user, password)


def _read_capped(upload: UploadFile, cap: int) -> bytes:
    chunks = []
    total = 0
    while True:
        chunk = upload.file.read(1 << 20)
        if not chunk:
            break
        total += len(chunk)
        if total > cap:
            raise errors.CorruptArchive(
                f"upload exceeds the configured cap of {cap} bytes")
        chunks.append(chunk)
    return b"".join(chunks)


def _declared_format(form_value: str | None, filename: str | None) -> ArchiveFormat:
    if form_value:
        return ArchiveFormat(form_value)
    name = (filename or "").lower()
    if name.endswith(".zip"):
        return ArchiveFormat.ZIP
    if name.endswith((".tar", ".tar.gz", ".tgz")):
        return ArchiveFormat.TAR
    raise errors.CorruptArchive("cannot infer archive format; pass format=zip|tar")
