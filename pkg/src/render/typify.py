"""
POI typification: nearby points collapse into one marker
"""

from dataclasses import dataclass
from typing import Sequence

from src.render.raster import PixelCoord


@dataclass(frozen=True)
class PoiCluster:
    members: tuple[int, ...]
    center: PixelCoord


def cluster_pois(pois: Sequence[tuple[int, PixelCoord]], radius: float) -> list[PoiCluster]:
    """Greedy clustering, lowest id first.

    The lowest-id unassigned POI seeds a cluster and absorbs every unassigned
    POI within radius of it (inclusive).
    """
    ordered = sorted(pois, key=lambda item: item[0])
    assigned: set[int] = set()
    r2 = radius * radius
    clusters = []
    for seed_idx, (_, (sx, sy)) in enumerate(ordered):
        if seed_idx in assigned:
            continue
        members = []
        for idx in range(seed_idx, len(ordered)):
            if idx in assigned:
                continue
            x, y = ordered[idx][1]
            if (x - sx) ** 2 + (y - sy) ** 2 <= r2:
                members.append(idx)
                assigned.add(idx)
        cx = sum(ordered[i][1][0] for i in members) / len(members)
        cy = sum(ordered[i][1][1] for i in members) / len(members)
        clusters.append(PoiCluster(tuple(ordered[i][0] for i in members), (cx, cy)))
    return clusters


def typify_pois(
    pois: Sequence[tuple[int, PixelCoord]], radius: float, min_size: int
) -> list[PixelCoord]:
    """Marker positions: one per cluster of at least min_size, else the POIs themselves"""
    by_id = dict(pois)
    markers: list[PixelCoord] = []
    for cluster in cluster_pois(pois, radius):
        if len(cluster.members) >= min_size:
            markers.append(cluster.center)
        else:
            markers.extend(by_id[i] for i in cluster.members)
    return markers
