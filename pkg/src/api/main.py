"""
FastAPI application serving one tileset read-only
"""

import socket
from pathlib import Path
from typing import Union

import uvicorn
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from loguru import logger

from src.api.routes import tiles
from src.core.config import get_settings
from src.core.exceptions import PortInUseError
from src.datasets.manifest import load_manifest


def create_app(root: Union[str, Path]) -> FastAPI:
    """App for the tileset at root; the manifest is verified once, before serving

    Raises:
        PrerequisiteMissingError: No manifest at root
        ManifestIntegrityError: A tile is missing or does not match its hash
    """
    manifest = load_manifest(root)
    app = FastAPI(
        title="cartogan tiles",
        description=f"{manifest.role} tileset ({len(manifest)} tiles)",
        version="0.1.0",
    )
    app.state.manifest = manifest
    app.state.index = {e.key: e for e in manifest.entries}

    # Slippy-map viewers load tiles cross-origin
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET"],
        allow_headers=["*"],
    )
    app.include_router(tiles.router, tags=["Tiles"])
    logger.info(f"Serving {manifest.role} tileset {manifest.root} ({len(manifest)} tiles)")
    return app


def port_available(host: str, port: int) -> bool:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        try:
            sock.bind((host, port))
        except OSError:
            return False
    return True


def serve(root: Union[str, Path], port: int = 8080, host: str = "127.0.0.1"):
    """Run the tile server in the foreground until interrupted

    Raises:
        PortInUseError: Something is already listening on host:port
    """
    app = create_app(root)
    if not port_available(host, port):
        raise PortInUseError(f"Port {port} on {host} is already in use")
    uvicorn.run(app, host=host, port=port, log_level=get_settings().log_level.lower())
