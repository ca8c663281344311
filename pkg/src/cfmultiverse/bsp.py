"""Post-hoc path construction between a factual point and a fixed endpoint.

Recursively halves the segment, keeping dataset points that fall inside
the lens around each half (within the current bound of both segment
ends), until the bound drops below tau or a partition runs dry; each
exhausted partition contributes one seeded-random representative.  The
surviving points are then ordered by distance to the endpoint so every
hop moves strictly closer.
"""

import random
from dataclasses import dataclass

import numpy as np

from .paths import Path


class BspError(ValueError):
    pass


@dataclass(frozen=True)
class BspConfig:
    tau: float
    seed: int = 0

    def __post_init__(self):
        if self.tau <= 0:
            raise BspError("tau must be positive")


def _members(x, indices, a, b, d):
    """Points within d of both ends of the segment a-b."""
    if not indices:
        return []
    sub = x[indices]
    near = (np.linalg.norm(sub - a, axis=1) <= d) & (np.linalg.norm(sub - b, axis=1) <= d)
    return [i for i, keep in zip(indices, near) if keep]


def _recurse(x, indices, a, b, d, tau, rng):
    if not indices:
        return []
    if d < tau:
        return [rng.choice(indices)]
    mid = (a + b) / 2.0
    half = d / 2.0
    left = _members(x, indices, a, mid, half)
    right = _members(x, indices, mid, b, half)
    if not left and not right:
        return [rng.choice(indices)]
    out = []
    if left:
        out.extend(_recurse(x, left, a, mid, half, tau, rng))
    if right:
        out.extend(_recurse(x, right, mid, b, half, tau, rng))
    return out


def construct_path_bsp(factual, endpoint, data, config):
    """Build a Path from factual to endpoint through dataset rows.

    Selected interior points are deduplicated, restricted to those
    strictly between the two ends (0 < distance-to-endpoint < the
    factual's own), drawn closer-first, and equidistant survivors after
    the first are dropped so the approach is strictly monotone.  The
    same seed always yields the same path.
    """
    if not data.encoded:
        raise BspError("construct_path_bsp needs an encoded dataset")
    factual = np.asarray(factual, dtype=float)
    endpoint = np.asarray(endpoint, dtype=float)
    gap = float(np.linalg.norm(endpoint - factual))
    if gap == 0.0:
        raise BspError("factual and endpoint coincide; no path to build")
    x = data.instances
    rng = random.Random(config.seed)
    chosen = _recurse(x, list(range(data.n_rows)), factual, endpoint, gap, config.tau, rng)

    seen = set()
    scored = []
    for i in chosen:
        if i in seen:
            continue
        seen.add(i)
        d = float(np.linalg.norm(x[i] - endpoint))
        if 0.0 < d < gap:
            scored.append((d, i))
    # farthest-from-endpoint first; equal distances keep only the first
    scored.sort(key=lambda t: (-t[0], t[1]))
    waypoints = []
    last_d = gap
    for d, i in scored:
        if d >= last_d:
            continue
        waypoints.append(x[i])
        last_d = d

    stops = [factual] + waypoints + [endpoint]
    steps = np.diff(np.vstack(stops), axis=0)
    return Path(origin=factual, steps=steps)
