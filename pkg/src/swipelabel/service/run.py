"""Server entry point: load config, build the app, hand it to uvicorn."""

from __future__ import annotations

import click
import uvicorn

from .app import create_app
from .config import ServiceConfig


@click.command()
@click.option("--config", "config_path", default=None,
              help="Path to the JSON config file (or set SWIPELABEL_CONFIG).")
def main(config_path):
    """Run the annotation service."""
    config = ServiceConfig.load(config_path)
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)


if __name__ == "__main__":
    main()
