"""
Tile routes - read-only access to one tileset
"""

from fastapi import APIRouter, HTTPException, Request
from fastapi.responses import FileResponse

from src.datasets.manifest import MANIFEST_NAME, DatasetManifest

router = APIRouter()

MEDIA_TYPES = {
    "png": "image/png",
    "ppm": "image/x-portable-pixmap",
}


def _manifest(request: Request) -> DatasetManifest:
    return request.app.state.manifest


@router.get("/tiles/{z}/{x}/{y}.{ext}")
async def get_tile(request: Request, z: int, x: int, y: int, ext: str):
    """Tile bytes exactly as stored, or 404; a .png copy beside a .ppm tile is served too"""
    manifest = _manifest(request)
    entry = request.app.state.index.get(f"{z}/{x}/{y}")
    if entry is None or ext not in MEDIA_TYPES:
        raise HTTPException(status_code=404, detail=f"No tile {z}/{x}/{y}.{ext}")
    path = manifest.path_of(entry)
    if path.suffix != f".{ext}":
        path = path.with_suffix(f".{ext}")
        if ext != "png" or not path.is_file():
            raise HTTPException(status_code=404, detail=f"No tile {z}/{x}/{y}.{ext}")
    return FileResponse(path, media_type=MEDIA_TYPES[ext])


@router.get("/manifest.json")
async def get_manifest(request: Request):
    return FileResponse(_manifest(request).root / MANIFEST_NAME, media_type="application/json")


@router.get("/health")
async def health(request: Request):
    """Health check endpoint"""
    manifest = _manifest(request)
    return {"status": "healthy", "role": manifest.role, "tiles": len(manifest)}
