"""
Line-oriented text format for vector scenes

    scene v1 <seed> <minx> <miny> <maxx> <maxy>
    <id> <CLASS> <kind> <n> <x1> <y1> ... <xn> <yn>

Coordinates carry 3 decimals. Lines starting with '#' and blank lines are
ignored by the parser.
"""

import math
from pathlib import Path
from typing import Union

from loguru import logger

from src.city.features import GEOMETRY_KINDS, FeatureClass, VectorFeature, VectorScene
from src.core.exceptions import CartoganException, SceneParseError
from src.tiles.geometry import GeoBounds

MAGIC = "scene"
VERSION = "v1"
BOUNDS_TOLERANCE = 1e-3


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def serialize_scene(scene: VectorScene) -> str:
    """Canonical text form; identical scenes give identical bytes"""
    b = scene.bounds
    lines = [" ".join([MAGIC, VERSION, str(scene.seed), *map(_fmt, b.as_tuple())])]
    for f in scene.features:
        coords = f.geometry.coords
        parts = [str(f.id), f.feature_class.value, f.geometry.kind, str(len(coords))]
        for x, y in coords:
            parts.append(_fmt(x))
            parts.append(_fmt(y))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _number(token: str, line_number: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise SceneParseError(line_number, f"invalid coordinate {token!r}") from None
    if not math.isfinite(v):
        raise SceneParseError(line_number, f"non-finite coordinate {token!r}")
    return v


def _integer(token: str, line_number: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise SceneParseError(line_number, f"invalid {what} {token!r}") from None


def _parse_header(tokens: list[str], line_number: int) -> tuple[int, GeoBounds]:
    if len(tokens) != 7 or tokens[0] != MAGIC:
        raise SceneParseError(
            line_number, "expected header 'scene v1 <seed> <minx> <miny> <maxx> <maxy>'"
        )
    if tokens[1] != VERSION:
        raise SceneParseError(line_number, f"unsupported version {tokens[1]!r}")
    seed = _integer(tokens[2], line_number, "seed")
    coords = [_number(t, line_number) for t in tokens[3:]]
    try:
        bounds = GeoBounds.from_coords(*coords)
    except CartoganException as e:
        raise SceneParseError(line_number, str(e)) from e
    return seed, bounds


def _parse_feature(tokens: list[str], line_number: int, bounds: GeoBounds) -> VectorFeature:
    if len(tokens) < 4:
        raise SceneParseError(line_number, "expected '<id> <CLASS> <kind> <n> <coords...>'")
    feature_id = _integer(tokens[0], line_number, "id")
    try:
        feature_class = FeatureClass(tokens[1])
    except ValueError:
        raise SceneParseError(line_number, f"unknown class {tokens[1]!r}") from None
    geometry_type = GEOMETRY_KINDS.get(tokens[2])
    if geometry_type is None:
        raise SceneParseError(line_number, f"unknown geometry kind {tokens[2]!r}")
    n = _integer(tokens[3], line_number, "vertex count")
    values = tokens[4:]
    if n < 1 or len(values) != 2 * n:
        raise SceneParseError(
            line_number, f"vertex count {n} does not match {len(values)} coordinate values"
        )
    xy = [_number(t, line_number) for t in values]
    coords = tuple(zip(xy[0::2], xy[1::2]))
    tol = BOUNDS_TOLERANCE
    for x, y in coords:
        if not (
            bounds.min.x - tol <= x <= bounds.max.x + tol
            and bounds.min.y - tol <= y <= bounds.max.y + tol
        ):
            raise SceneParseError(line_number, f"vertex ({x}, {y}) outside scene bounds")
    try:
        return VectorFeature(feature_id, feature_class, geometry_type(coords))
    except CartoganException as e:
        raise SceneParseError(line_number, str(e)) from e


def parse_scene(text: str) -> VectorScene:
    """Parse a scene document; errors carry the 1-based line number"""
    header = None
    features: list[VectorFeature] = []
    ids: dict[int, int] = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if header is None:
            header = _parse_header(tokens, line_number)
            continue
        feature = _parse_feature(tokens, line_number, header[1])
        if feature.id in ids and feature.geometry.kind != "polyline":
            raise SceneParseError(
                line_number, f"duplicate id {feature.id} (first on line {ids[feature.id]})"
            )
        ids.setdefault(feature.id, line_number)
        features.append(feature)

    if header is None:
        raise SceneParseError(1, "missing scene header")
    seed, bounds = header
    try:
        return VectorScene(bounds=bounds, seed=seed, features=tuple(features))
    except CartoganException as e:
        raise SceneParseError(len(text.splitlines()), str(e)) from e


def write_scene(scene: VectorScene, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_scene(scene), encoding="utf-8", newline="\n")
    logger.debug(f"Wrote scene with {len(scene)} features to {path}")
    return path


def read_scene(path: Union[str, Path]) -> VectorScene:
    return parse_scene(Path(path).read_text(encoding="utf-8"))
