"""Vector-space path geometry.

A path is an origin point plus a matrix of consecutive step vectors;
its endpoint is origin + sum(steps).  Paths of different step counts
are compared after arc-length normalization: resample each polyline at
o points equally spaced along its own length.  On top of that sit the
three comparison measures: branching point, direction difference and
the (vector) opportunity potential of one endpoint towards another.
"""

import json
from dataclasses import dataclass

import numpy as np


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class Path:
    """origin (m,) and steps (s, m); s >= 1, shared dimensionality."""

    origin: np.ndarray
    steps: np.ndarray

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float)
        steps = np.asarray(self.steps, dtype=float)
        if origin.ndim != 1:
            raise PathError("origin must be a single point")
        if steps.ndim != 2 or steps.shape[0] < 1:
            raise PathError("steps must be a non-empty (s, m) matrix")
        if steps.shape[1] != origin.shape[0]:
            raise PathError(
                f"dimension mismatch: origin has {origin.shape[0]}, steps have {steps.shape[1]}"
            )
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "steps", steps)

    @property
    def endpoint(self):
        return self.origin + self.steps.sum(axis=0)

    def vertices(self):
        """Absolute polyline vertices, (s + 1, m)."""
        return self.origin + np.vstack([np.zeros_like(self.origin), np.cumsum(self.steps, axis=0)])


@dataclass(frozen=True)
class NormalizedPath:
    """origin (m,) and points (o, m): displacements at equal arc spacing."""

    origin: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))

    @property
    def o(self):
        return self.points.shape[0]

    @property
    def endpoint(self):
        return self.origin + self.points[-1]


def path_length(p):
    """Total arc length: sum of step norms."""
    return float(np.linalg.norm(p.steps, axis=1).sum())


def normalize_path(p, o):
    """Resample a path at o points spaced total_length/o apart along the polyline.

    The j-th output displacement sits at arc position (j/o) * length,
    j = 1..o, so the last point is exactly the path endpoint.  Zero
    total length leaves arc positions undefined and is an error;
    individual zero steps are fine (they occupy no arc).
    """
    if o < 1:
        raise PathError(f"o must be >= 1, got {o}")
    lengths = np.linalg.norm(p.steps, axis=1)
    total = float(lengths.sum())
    if total == 0.0:
        raise PathError("cannot normalize a zero-length path")
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    cumsteps = np.vstack([np.zeros(p.steps.shape[1]), np.cumsum(p.steps, axis=0)])
    points = np.empty((o, p.steps.shape[1]))
    for j in range(1, o + 1):
        if j == o:
            # exact endpoint, no interpolation residue
            points[-1] = cumsteps[-1]
            break
        beta = (j / o) * total
        # last segment whose start is <= beta; 'right' skips zero-length segments
        idx = int(np.searchsorted(cum, beta, side="right")) - 1
        idx = min(idx, len(lengths) - 1)
        seg = lengths[idx]
        frac = 0.0 if seg == 0.0 else (beta - cum[idx]) / seg
        points[j - 1] = cumsteps[idx] + frac * p.steps[idx]
    return NormalizedPath(origin=p.origin.copy(), points=points)


def point_to_path_distance(point, q):
    """Smallest L2 distance from an absolute point to a normalized path's points."""
    positions = q.origin + q.points
    return float(np.linalg.norm(positions - np.asarray(point, dtype=float), axis=1).min())


def find_branching_point(a, b, eps):
    """First index (1-based) along a whose point sits farther than eps from b.

    Works on absolute positions, so differing origins are meaningful.
    Returns None when no point of a ever leaves the eps-tube around b.
    """
    if eps < 0:
        raise PathError("eps must be non-negative")
    if a.o != b.o:
        raise PathError(f"paths must share o: {a.o} != {b.o}")
    positions = a.origin + a.points
    for i, pos in enumerate(positions):
        if point_to_path_distance(pos, b) > eps:
            return i + 1
    return None


def uniform_weights(o):
    """Unit-norm constant weight vector of length o."""
    return np.full(o, 1.0 / np.sqrt(o))


def validate_weights(w, o):
    w = np.asarray(w, dtype=float)
    if w.shape != (o,):
        raise PathError(f"weight vector must have shape ({o},)")
    if abs(np.linalg.norm(w) - 1.0) > 1e-9:
        raise PathError("weight vector must have unit L2 norm")
    if np.any(np.diff(w) > 1e-12):
        raise PathError("weights must be non-increasing")
    return w


def direction_difference(a, b, weights=None):
    """Weighted sum of pointwise distances between two normalized paths.

    Requires a shared origin and a shared o; weights default to the
    uniform unit vector.  Larger weights early emphasise divergence
    near the start.
    """
    if a.o != b.o:
        raise PathError(f"paths must share o: {a.o} != {b.o}")
    if not np.array_equal(a.origin, b.origin):
        raise PathError("direction difference requires a shared origin")
    w = uniform_weights(a.o) if weights is None else validate_weights(weights, a.o)
    gaps = np.linalg.norm(a.points - b.points, axis=1)
    return float(np.dot(w, gaps))


def vector_opportunity_potential(factual, ref, cmp):
    """How much of the step towards cmp is shared with the step towards ref.

    Projects z_b = cmp - factual onto z_a = ref - factual and clamps the
    coefficient to [0, 1]: 1 when cmp lies at or beyond ref along the
    same ray, 0 when orthogonal or opposed.  ref == factual has no
    direction to project on and is an error.
    """
    factual = np.asarray(factual, dtype=float)
    z_a = np.asarray(ref, dtype=float) - factual
    z_b = np.asarray(cmp, dtype=float) - factual
    denom = float(np.dot(z_a, z_a))
    if denom == 0.0:
        raise PathError("reference endpoint coincides with the factual point")
    return float(min(1.0, max(0.0, np.dot(z_a, z_b) / denom)))


def opportunity_matrix(factual, endpoints):
    """Pairwise opportunity potentials plus the per-reference means.

    Entry [i][j] treats endpoint i as the reference and endpoint j as
    the comparison.  Row means include the diagonal (which is exactly 1),
    so a reference whose direction is shared by every alternative scores
    towards 1.
    """
    endpoints = [np.asarray(e, dtype=float) for e in endpoints]
    if len(endpoints) < 2:
        raise PathError("need at least two endpoints to compare")
    n = len(endpoints)
    matrix = np.ones((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            matrix[i, j] = vector_opportunity_potential(factual, endpoints[i], endpoints[j])
    return matrix, matrix.mean(axis=1)


def path_to_json(p):
    return {"origin": [float(v) for v in p.origin],
            "steps": [[float(v) for v in row] for row in p.steps]}


def path_from_json(doc):
    if not isinstance(doc, dict) or "origin" not in doc or "steps" not in doc:
        raise PathError("path document needs 'origin' and 'steps'")
    return Path(origin=np.asarray(doc["origin"], dtype=float),
                steps=np.asarray(doc["steps"], dtype=float))


def load_path(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PathError(f"{path}: not valid JSON ({exc})") from exc
    return path_from_json(doc)
