"""
Procedural non-map images

Negatives for the map / non-map classifier: fractal value noise, smooth color
gradients and soft blobs, each a pure function of (seed, index, size).
"""

from typing import Callable

import numpy as np
from PIL import Image

from src.render.raster import RasterTile

TEXTURE_KINDS = ("noise", "gradient", "blobs")


def _upsample(grid: np.ndarray, size: int) -> np.ndarray:
    """Bicubic resize of an (h, w) float grid in [0, 1] to size x size"""
    img = Image.fromarray(grid.astype(np.float32))
    return np.asarray(img.resize((size, size), Image.Resampling.BICUBIC), dtype=np.float64)


def _palette(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    return rng.uniform(0, 255, size=3), rng.uniform(0, 255, size=3)


def _blend(t: np.ndarray, low: np.ndarray, high: np.ndarray) -> np.ndarray:
    t = np.clip(t, 0.0, 1.0)[..., None]
    return low * (1 - t) + high * t


def fractal_noise(rng: np.random.Generator, size: int, octaves: int = 4) -> np.ndarray:
    field = np.zeros((size, size))
    amplitude, total = 1.0, 0.0
    cells = int(rng.integers(2, 5))
    for _ in range(octaves):
        field += amplitude * _upsample(rng.random((cells + 1, cells + 1)), size)
        total += amplitude
        amplitude *= 0.5
        cells *= 2
    field /= total
    low, high = _palette(rng)
    rgb = _blend(field, low, high)
    # per-channel grain
    return rgb + rng.normal(0, 6, size=rgb.shape)


def smooth_gradient(rng: np.random.Generator, size: int) -> np.ndarray:
    angle = rng.uniform(0, 2 * np.pi)
    ys, xs = np.mgrid[0:size, 0:size] / max(size - 1, 1)
    t = xs * np.cos(angle) + ys * np.sin(angle)
    t = (t - t.min()) / max(t.max() - t.min(), 1e-9)
    low, high = _palette(rng)
    return _blend(t ** rng.uniform(0.5, 2.0), low, high)


def soft_blobs(rng: np.random.Generator, size: int, count: int = 6) -> np.ndarray:
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    rgb = np.empty((size, size, 3))
    rgb[:] = rng.uniform(0, 255, size=3)
    for _ in range(count):
        cx, cy = rng.uniform(0, size, size=2)
        radius = rng.uniform(size / 10, size / 3)
        weight = np.exp(-((xs - cx) ** 2 + (ys - cy) ** 2) / (2 * radius**2))
        rgb = rgb * (1 - weight[..., None]) + rng.uniform(0, 255, size=3) * weight[..., None]
    return rgb


_GENERATORS: dict[str, Callable[[np.random.Generator, int], np.ndarray]] = {
    "noise": fractal_noise,
    "gradient": smooth_gradient,
    "blobs": soft_blobs,
}


def texture(seed: int, index: int, size: int = 64) -> RasterTile:
    """Texture number `index` of the family seeded by `seed`; kinds cycle by index"""
    kind = TEXTURE_KINDS[index % len(TEXTURE_KINDS)]
    rng = np.random.default_rng([seed, 5, index])
    rgb = _GENERATORS[kind](rng, size)
    return RasterTile(np.clip(np.rint(rgb), 0, 255).astype(np.uint8))


def texture_kind(index: int) -> str:
    return TEXTURE_KINDS[index % len(TEXTURE_KINDS)]
