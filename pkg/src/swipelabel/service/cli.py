"""Admin command-line client. Talks to a running service over HTTP and
mirrors the admin endpoints one to one.

    swipelabel-admin --server-url http://localhost:8000 --token TOKEN \
        dataset ingest patches.zip --name "tumor patches"
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx


def _client(ctx) -> httpx.Client:
    return httpx.Client(
        base_url=ctx.obj["server_url"],
        headers={"Authorization": f"Bearer {ctx.obj['token']}"}
        if ctx.obj["token"] else {},
        timeout=120.0,
    )


def _emit(ctx, payload) -> None:
    if ctx.obj["format"] == "json":
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
        return
    if isinstance(payload, dict):
        width = max((len(k) for k in payload), default=0)
        for key, value in payload.items():
            click.echo(f"{key.ljust(width)}  {value}")
    else:
        click.echo(payload)


def _call(ctx, method: str, path: str, **kwargs):
    with _client(ctx) as client:
        response = client.request(method, path, **kwargs)
    if response.status_code >= 400:
        try:
            doc = response.json()
            message = f"{doc.get('code', 'error')}: {doc.get('message', '')}"
        except ValueError:
            message = response.text
        click.echo(f"error ({response.status_code}) {message}", err=True)
        sys.exit(1)
    return response


@click.group()
@click.option("--server-url", default="http://127.0.0.1:8000", show_default=True,
              help="Base URL of the running service.")
@click.option("--token", default="", help="Bearer token from login.")
@click.option("--format", "output_format", type=click.Choice(["json", "table"]),
              default="table", show_default=True)
@click.pass_context
def main(ctx, server_url, token, output_format):
    """Administer a swipelabel service."""
    ctx.ensure_object(dict)
    ctx.obj.update(server_url=server_url, token=token, format=output_format)


@main.command()
@click.option("--user", "user_id", required=True)
@click.option("--password", required=True)
@click.pass_context
def login(ctx, user_id, password):
    """Obtain a bearer token."""
    response = _call(ctx, "POST", "/api/auth/login",
                     json={"user_id": user_id, "password": password})
    _emit(ctx, response.json())


@main.group()
def group():
    """Project groups."""


@group.command("create")
@click.argument("group_id")
@click.option("--name", required=True)
@click.option("--member", "members", multiple=True)
@click.pass_context
def group_create(ctx, group_id, name, members):
    response = _call(ctx, "POST", "/api/admin/groups",
                     json={"group_id": group_id, "name": name,
                           "members": list(members)})
    _emit(ctx, response.json())


@main.group()
def user():
    """User accounts."""


@user.command("create")
@click.argument("user_id")
@click.option("--display-name", default="")
@click.option("--password", required=True)
@click.option("--role", type=click.Choice(["admin", "participant"]),
              default="participant", show_default=True)
@click.option("--group", "groups", multiple=True)
@click.pass_context
def user_create(ctx, user_id, display_name, password, role, groups):
    response = _call(ctx, "POST", "/api/admin/users",
                     json={"user_id": user_id, "display_name": display_name,
                           "password": password, "role": role,
                           "group_ids": list(groups)})
    _emit(ctx, response.json())


@main.group()
def dataset():
    """Image datasets."""


@dataset.command("ingest")
@click.argument("archive", type=click.Path(exists=True, path_type=Path))
@click.option("--name", default=None, help="Dataset name (defaults to filename).")
@click.option("--archive-format", type=click.Choice(["zip", "tar"]), default=None,
              help="Override format detection from the file extension.")
@click.option("--manifest", type=click.Path(exists=True, path_type=Path),
              default=None, help="filename,label CSV with ground truth.")
@click.pass_context
def dataset_ingest(ctx, archive, name, archive_format, manifest):
    files = {"file": (archive.name, archive.read_bytes())}
    if manifest is not None:
        files["manifest"] = (manifest.name, manifest.read_bytes())
    data = {}
    if name:
        data["name"] = name
    if archive_format:
        data["format"] = archive_format
    response = _call(ctx, "POST", "/api/admin/datasets", files=files, data=data)
    _emit(ctx, response.json())


@main.group()
def study():
    """Studies."""


@study.command("create")
@click.option("--study-id", required=True)
@click.option("--dataset-id", required=True)
@click.option("--mapping", "mapping_json", default=None,
              help='JSON like {"left": {"action": "label", "class_name": "normal"}};'
                   " omit for the two-class default.")
@click.option("--mode", type=click.Choice(["annotation", "training"]),
              default="annotation", show_default=True)
@click.option("--participant", "participants", multiple=True)
@click.option("--scale-percent", type=int, default=100, show_default=True)
@click.option("--interpolation/--no-interpolation", default=False)
@click.pass_context
def study_create(ctx, study_id, dataset_id, mapping_json, mode, participants,
                 scale_percent, interpolation):
    body = {
        "study_id": study_id,
        "dataset_id": dataset_id,
        "mapping": json.loads(mapping_json) if mapping_json else {},
        "mode": mode,
        "display": {"scale_percent": scale_percent,
                    "interpolation_enabled": interpolation},
        "participants": list(participants),
    }
    response = _call(ctx, "POST", "/api/admin/studies", json=body)
    _emit(ctx, response.json())


@study.command("open")
@click.argument("study_id")
@click.pass_context
def study_open(ctx, study_id):
    response = _call(ctx, "POST", f"/api/admin/studies/{study_id}/open")
    _emit(ctx, response.json())


@study.command("close")
@click.argument("study_id")
@click.pass_context
def study_close(ctx, study_id):
    response = _call(ctx, "POST", f"/api/admin/studies/{study_id}/close")
    _emit(ctx, response.json())


@main.command()
@click.argument("study_id")
@click.option("--include-history", is_flag=True,
              help="Every event row, including postpones and undone decisions.")
@click.option("--output", "-o", type=click.Path(path_type=Path), default=None,
              help="Write to a file instead of stdout.")
@click.pass_context
def export(ctx, study_id, include_history, output):
    """Download the annotation CSV."""
    response = _call(ctx, "GET", f"/api/admin/studies/{study_id}/export.csv",
                     params={"include_history": include_history})
    warning = response.headers.get("X-Warning")
    if warning:
        click.echo(f"warning: {warning}", err=True)
    if output is not None:
        output.write_bytes(response.content)
        click.echo(f"wrote {output}")
    else:
        sys.stdout.write(response.content.decode("utf-8"))


@main.command()
@click.argument("study_id")
@click.option("--text", is_flag=True, help="Plain-text tables instead of JSON.")
@click.pass_context
def report(ctx, study_id, text):
    """Agreement and timing report for a study."""
    params = {"format": "text"} if text else {}
    response = _call(ctx, "GET", f"/api/admin/studies/{study_id}/report",
                     params=params)
    if text:
        click.echo(response.text, nl=False)
    else:
        _emit(ctx, response.json())


if __name__ == "__main__":
    main()
