"""Shared fixtures: a fully wired service instance plus archive builders."""

import io
import zipfile

import pytest
from fastapi.testclient import TestClient
from PIL import Image

from swipelabel.service.app import create_app
from swipelabel.service.config import ServiceConfig

ADMIN_PASSWORD = "admin-secret"


def make_png(width=128, height=128, color=(120, 40, 40)) -> bytes:
    buf = io.BytesIO()
    Image.new("RGB", (width, height), color).save(buf, format="PNG")
    return buf.getvalue()


def make_zip(entries: dict[str, bytes]) -> bytes:
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as zf:
        for name, data in entries.items():
            zf.writestr(name, data)
    return buf.getvalue()


def patch_archive(count: int, width=128, height=128) -> bytes:
    """Zip of ``count`` distinct PNG patches named patch_000.png ..."""
    return make_zip({
        f"patch_{i:03d}.png": make_png(width, height, ((i * 7) % 256, 60, 90))
        for i in range(count)
    })


class ServiceHarness:
    """A running app, its store, and the common admin/participant flows."""

    def __init__(self, tmp_path, **config_overrides):
        overrides = dict(
            database_path=str(tmp_path / "service.db"),
            blob_store_path=str(tmp_path / "blobs"),
            admin_password=ADMIN_PASSWORD,
        )
        overrides.update(config_overrides)
        self.config = ServiceConfig(**overrides)
        self.app = create_app(self.config)
        self.store = self.app.state.store
        self.client = TestClient(self.app, raise_server_exceptions=True)
        self.admin = self.login("admin", ADMIN_PASSWORD)

    def login(self, user_id, password) -> dict:
        response = self.client.post(
            "/api/auth/login", json={"user_id": user_id, "password": password})
        assert response.status_code == 200, response.text
        doc = response.json()
        doc["headers"] = {"Authorization": f"Bearer {doc['token']}"}
        return doc

    def create_participant(self, user_id, password="pw") -> dict:
        response = self.client.post(
            "/api/admin/users", headers=self.admin["headers"],
            json={"user_id": user_id, "display_name": user_id.title(),
                  "password": password, "role": "participant"})
        assert response.status_code == 200, response.text
        return self.login(user_id, password)

    def upload_patches(self, count, name="patches", manifest: bytes | None = None):
        files = {"file": (f"{name}.zip", patch_archive(count), "application/zip")}
        if manifest is not None:
            files["manifest"] = ("labels.csv", manifest, "text/csv")
        response = self.client.post("/api/admin/datasets",
                                    headers=self.admin["headers"],
                                    files=files, data={"name": name})
        assert response.status_code == 200, response.text
        return response.json()

    def create_study(self, study_id, dataset_id, participants,
                     mode="annotation", mapping=None, open_study=True):
        body = {
            "study_id": study_id,
            "dataset_id": dataset_id,
            "mode": mode,
            "mapping": mapping or {
                "left": {"action": "label", "class_name": "normal"},
                "right": {"action": "label", "class_name": "atypical"},
                "up": {"action": "postpone"},
            },
            "participants": participants,
        }
        response = self.client.post("/api/admin/studies",
                                    headers=self.admin["headers"], json=body)
        assert response.status_code == 200, response.text
        if open_study:
            response = self.client.post(f"/api/admin/studies/{study_id}/open",
                                        headers=self.admin["headers"])
            assert response.status_code == 200, response.text
        return response.json()


@pytest.fixture
def harness(tmp_path):
    return ServiceHarness(tmp_path)


# one PASS/FAIL line per acceptance criterion at the end of the run
_acceptance_outcomes: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and report.when == "call":
        _acceptance_outcomes[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_outcomes.items():
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
