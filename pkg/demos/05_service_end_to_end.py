"""
The full service: provision, ingest, annotate, export, report
=============================================================

Drives the HTTP API through a complete study life cycle in-process. The
same flow works against a deployed server via the admin CLI::

    swipelabel-server --config service.json
    swipelabel-admin --server-url http://localhost:8000 --token ... dataset ingest patches.zip
"""

import io
import tempfile
import zipfile
from pathlib import Path

from fastapi.testclient import TestClient
from PIL import Image

from swipelabel.service.app import create_app
from swipelabel.service.config import ServiceConfig

workdir = Path(tempfile.mkdtemp(prefix="swipelabel-demo-"))
app = create_app(ServiceConfig(
    database_path=str(workdir / "service.db"),
    blob_store_path=str(workdir / "blobs"),
    admin_password="demo-admin-pw",
))
client = TestClient(app)


def auth(user, password):
    token = client.post("/api/auth/login",
                        json={"user_id": user, "password": password}).json()["token"]
    return {"Authorization": f"Bearer {token}"}


admin = auth("admin", "demo-admin-pw")

# provision two participants
for pid in ("ada", "grace"):
    client.post("/api/admin/users", headers=admin,
                json={"user_id": pid, "password": "pw", "display_name": pid.title()})

# upload a 12-patch archive
buf = io.BytesIO()
with zipfile.ZipFile(buf, "w") as zf:
    for i in range(12):
        img = io.BytesIO()
        Image.new("RGB", (128, 128), (20 * i % 256, 80, 90)).save(img, format="PNG")
        zf.writestr(f"patch_{i:02d}.png", img.getvalue())
dataset = client.post("/api/admin/datasets", headers=admin,
                      files={"file": ("patches.zip", buf.getvalue())},
                      data={"name": "demo set"}).json()
print("dataset:", dataset["dataset_id"], f"({dataset['patch_count']} patches)")

# create and open the study
client.post("/api/admin/studies", headers=admin, json={
    "study_id": "demo-study",
    "dataset_id": dataset["dataset_id"],
    "mapping": {"left": {"action": "label", "class_name": "normal"},
                "right": {"action": "label", "class_name": "atypical"},
                "up": {"action": "postpone"}},
    "participants": ["ada", "grace"]})
client.post("/api/admin/studies/demo-study/open", headers=admin)

# both participants swipe through their (independently shuffled) decks;
# they agree except where the patch number ends in a digit only one flips on
for pid, flip_digit in (("ada", "3"), ("grace", "7")):
    headers = auth(pid, "pw")
    swipes = 0
    while True:
        item = client.get("/api/studies/demo-study/next", headers=headers).json()
        if item["done"]:
            break
        filename = item["patch"]["filename"]
        direction = "right" if filename[-5] in ("0", "2", "4", flip_digit) else "left"
        client.post("/api/studies/demo-study/annotations", headers=headers,
                    json={"direction": direction, "client_duration_ms": 1200,
                          "device_type": "desktop"})
        swipes += 1
    print(f"{pid} finished after {swipes} swipes")

# export the CSV and render the agreement report
csv_bytes = client.get("/api/admin/studies/demo-study/export.csv",
                       headers=admin).content
print("\nexport preview:")
for line in csv_bytes.decode().splitlines()[:4]:
    print(" ", line[:100])

print("\nreport:")
print(client.get("/api/admin/studies/demo-study/report",
                 params={"format": "text"}, headers=admin).text)
