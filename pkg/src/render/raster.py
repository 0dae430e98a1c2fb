"""
Raster tiles and rasterization primitives

Coverage is binary (no anti-aliasing): a pixel is covered when its center
(px + 0.5, py + 0.5) is inside the shape. Colors are composited with 8-bit
alpha-over, rounding half up.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from src.core.exceptions import CorruptTileError, MixedTileSizeError
from src.render.styles import Marker, Rgba

TILE_SIZES = (64, 128, 256)
IMAGE_SUFFIXES = (".ppm", ".png")

PixelCoord = tuple[float, float]


@dataclass
class RasterTile:
    """Square RGB8 image, row-major H x W x 3"""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.dtype != np.uint8 or p.ndim != 3 or p.shape[2] != 3:
            raise ValueError(f"Tile pixels must be uint8 HxWx3, got {p.dtype} {p.shape}")
        if p.shape[0] != p.shape[1] or p.shape[0] not in TILE_SIZES:
            raise MixedTileSizeError(
                f"Tile must be square with size in {TILE_SIZES}, got {p.shape[1]}x{p.shape[0]}"
            )

    @classmethod
    def blank(cls, size: int, color: Rgba) -> "RasterTile":
        pixels = np.empty((size, size, 3), dtype=np.uint8)
        pixels[:] = color.rgb
        return cls(pixels)

    @property
    def size(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def to_bytes(self) -> bytes:
        return np.ascontiguousarray(self.pixels).tobytes()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RasterTile) and np.array_equal(self.pixels, other.pixels)


def composite(img: np.ndarray, mask: np.ndarray, color: Rgba):
    """Alpha-over color onto img wherever mask is set, in place"""
    a = color.a
    if a == 0 or not mask.any():
        return
    src = np.array(color.rgb, dtype=np.int32)
    dst = img[mask].astype(np.int32)
    blended = src * a + dst * (255 - a)
    # floor(v / 255 + 1/2) in integers
    img[mask] = ((2 * blended + 255) // 510).astype(np.uint8)


def _centers(shape: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
    h, w = shape[:2]
    ys, xs = np.mgrid[0:h, 0:w]
    return xs + 0.5, ys + 0.5


def polygon_mask(shape: tuple[int, ...], ring: Sequence[PixelCoord]) -> np.ndarray:
    """Even-odd scanline coverage of a closed ring"""
    h, w = shape[:2]
    mask = np.zeros((h, w), dtype=bool)
    if len(ring) < 3:
        return mask
    pts = np.asarray(ring, dtype=np.float64)
    x0, y0 = pts[:, 0], pts[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    row_lo = max(0, int(np.floor(pts[:, 1].min() - 0.5)))
    row_hi = min(h, int(np.ceil(pts[:, 1].max() + 0.5)))
    for row in range(row_lo, row_hi):
        yc = row + 0.5
        # half-open rule: an edge counts when yc lies in [ymin, ymax)
        crossing = ((y0 <= yc) & (y1 > yc)) | ((y1 <= yc) & (y0 > yc))
        if not crossing.any():
            continue
        xa, ya, xb, yb = x0[crossing], y0[crossing], x1[crossing], y1[crossing]
        xs = np.sort(xa + (yc - ya) * (xb - xa) / (yb - ya))
        for start, end in zip(xs[0::2], xs[1::2]):
            # pixel centers px + 0.5 in [start, end)
            c0 = max(0, int(np.ceil(start - 0.5)))
            c1 = min(w, int(np.ceil(end - 0.5)))
            if c1 > c0:
                mask[row, c0:c1] = True
    return mask


def stroke_mask(shape: tuple[int, ...], pts: Sequence[PixelCoord], width: float) -> np.ndarray:
    """Pixels whose center lies within width/2 of any segment"""
    h, w = shape[:2]
    mask = np.zeros((h, w), dtype=bool)
    if width <= 0 or len(pts) < 2:
        return mask
    half = width / 2.0
    for (ax, ay), (bx, by) in zip(pts, pts[1:]):
        c0 = max(0, int(np.floor(min(ax, bx) - half - 1)))
        c1 = min(w, int(np.ceil(max(ax, bx) + half + 1)))
        r0 = max(0, int(np.floor(min(ay, by) - half - 1)))
        r1 = min(h, int(np.ceil(max(ay, by) + half + 1)))
        if c1 <= c0 or r1 <= r0:
            continue
        ys, xs = np.mgrid[r0:r1, c0:c1]
        px = xs + 0.5
        py = ys + 0.5
        dx, dy = bx - ax, by - ay
        length2 = dx * dx + dy * dy
        if length2 == 0:
            t = np.zeros_like(px)
        else:
            t = np.clip(((px - ax) * dx + (py - ay) * dy) / length2, 0.0, 1.0)
        dist2 = (px - (ax + t * dx)) ** 2 + (py - (ay + t * dy)) ** 2
        mask[r0:r1, c0:c1] |= dist2 <= half * half
    return mask


def disc_mask(shape: tuple[int, ...], center: PixelCoord, radius: float) -> np.ndarray:
    px, py = _centers(shape)
    return (px - center[0]) ** 2 + (py - center[1]) ** 2 <= radius * radius


def marker_mask(shape: tuple[int, ...], p: PixelCoord, marker: Marker) -> np.ndarray:
    """Circle centered on p, or a pin whose tip touches p"""
    r = marker.radius
    if marker.shape == "circle":
        return disc_mask(shape, p, r)
    head = (p[0], p[1] - 2 * r)
    tail = polygon_mask(shape, [(p[0] - r, head[1]), (p[0], p[1]), (p[0] + r, head[1])])
    return disc_mask(shape, head, r) | tail


def fill_polygon(img: np.ndarray, ring: Sequence[PixelCoord], color: Rgba):
    composite(img, polygon_mask(img.shape, ring), color)


def draw_polyline(img: np.ndarray, pts: Sequence[PixelCoord], width: float, color: Rgba):
    # one composite for the union so joints are not blended twice
    composite(img, stroke_mask(img.shape, pts, width), color)


def draw_marker(img: np.ndarray, p: PixelCoord, marker: Marker):
    composite(img, marker_mask(img.shape, p, marker), marker.color)


def read_image(path: Union[str, Path]) -> np.ndarray:
    """Decode any Pillow-readable image to an HxWx3 uint8 array"""
    path = Path(path)
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()
    except FileNotFoundError:
        raise CorruptTileError(path, "file not found") from None
    except (UnidentifiedImageError, OSError, ValueError, SyntaxError) as e:
        raise CorruptTileError(path, str(e)) from e


def read_tile(path: Union[str, Path]) -> RasterTile:
    pixels = read_image(path)
    try:
        return RasterTile(pixels)
    except MixedTileSizeError as e:
        raise CorruptTileError(path, str(e)) from e


def write_tile(
    tile: Union[RasterTile, np.ndarray], path: Union[str, Path], png_copy: bool = False
) -> Path:
    """Write PPM (P6) or PNG depending on the suffix; returns `path`

    With png_copy a PNG of the same pixels is also written beside a .ppm file.
    """
    path = Path(path)
    pixels = np.ascontiguousarray(tile.pixels if isinstance(tile, RasterTile) else tile)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = "PNG" if path.suffix.lower() == ".png" else "PPM"
    image = Image.fromarray(pixels)
    image.save(path, format=fmt)
    if png_copy and fmt == "PPM":
        image.save(path.with_suffix(".png"), format="PNG")
    return path


def tile_to_array(tile: Union[RasterTile, np.ndarray]) -> np.ndarray:
    """HxWx3 uint8 -> 3xHxW float32 in [-1, 1]"""
    pixels = tile.pixels if isinstance(tile, RasterTile) else tile
    return (pixels.astype(np.float32) / 127.5 - 1.0).transpose(2, 0, 1)


def array_to_tile(arr: np.ndarray) -> RasterTile:
    """3xHxW values in (-1, 1) -> RGB8 via round((v + 1) * 127.5), half up, clamped"""
    v = np.floor((arr.astype(np.float64) + 1.0) * 127.5 + 0.5)
    pixels = np.clip(v, 0, 255).astype(np.uint8).transpose(1, 2, 0)
    return RasterTile(np.ascontiguousarray(pixels))


def resize_tile(tile: RasterTile, size: int) -> RasterTile:
    """Bilinear resample to size x size; identity when the size already matches"""
    if tile.size == size:
        return tile
    img = Image.fromarray(np.ascontiguousarray(tile.pixels))
    return RasterTile(np.asarray(img.resize((size, size), Image.Resampling.BILINEAR)).copy())
