"""Independent reference implementations used to check the library.

Everything here is written the slow, obvious way on purpose: scalar
walks, exhaustive enumeration, dense grids.  None of it shares code
with the package.
"""

import math

import numpy as np


def resample_by_walk(origin, steps, o):
    """Literal arc-length resampling: for each j walk the steps, spending
    the remaining budget beta on each step in turn."""
    steps = np.asarray(steps, dtype=float)
    lengths = [math.sqrt(float(np.dot(s, s))) for s in steps]
    total = sum(lengths)
    points = []
    for j in range(1, o + 1):
        beta = (j / o) * total
        tau = np.zeros(steps.shape[1])
        for step, length in zip(steps, lengths):
            if length == 0.0:
                continue
            if beta <= 0.0:
                break
            if beta >= length:
                tau = tau + step
            else:
                tau = tau + (beta / length) * step
            beta -= length
        points.append(tau)
    return np.asarray(points)


def arc_position(origin, steps, point, start=0.0, tol=1e-7):
    """Arc-length position of a point lying on the polyline, searching
    forward from arc position `start`.  Uses the triangle identity
    |A-q| + |q-B| == |A-B| to find the containing segment."""
    origin = np.asarray(origin, dtype=float)
    steps = np.asarray(steps, dtype=float)
    vertices = [origin]
    for s in steps:
        vertices.append(vertices[-1] + s)
    cum = 0.0
    for a, b in zip(vertices, vertices[1:]):
        seg = float(np.linalg.norm(b - a))
        da = float(np.linalg.norm(point - a))
        db = float(np.linalg.norm(point - b))
        if cum + seg >= start - tol and abs(da + db - seg) <= tol * max(1.0, seg):
            return cum + da
        cum += seg
    raise AssertionError("point does not lie on the polyline")


def dense_projection_argmin(factual, ref, cmp_point, samples):
    """Grid argmin over t in [0,1] of |factual + t*(ref-factual) - cmp_point|."""
    factual = np.asarray(factual, dtype=float)
    z_a = np.asarray(ref, dtype=float) - factual
    ts = np.linspace(0.0, 1.0, samples)
    line = factual[None, :] + ts[:, None] * z_a[None, :]
    gaps = np.linalg.norm(line - np.asarray(cmp_point, dtype=float)[None, :], axis=1)
    return float(ts[int(np.argmin(gaps))])


def all_simple_paths(arcs, source, target):
    """Every simple path source -> target as (total_weight, vertex_tuple)."""
    out = []
    weight = {(u, v): w for u, outs in arcs.items() for v, w in outs}

    def visit(path, total, seen):
        v = path[-1]
        if v == target:
            out.append((total, tuple(path)))
            return
        for u, w in arcs.get(v, ()):
            if u in seen:
                continue
            seen.add(u)
            path.append(u)
            visit(path, total + w, seen)
            path.pop()
            seen.discard(u)

    visit([source], 0.0, {source})
    return out


def best_simple_path(arcs, source, target):
    """Minimal-weight simple path, ties to the lexicographically smallest
    vertex sequence; None when unreachable."""
    paths = all_simple_paths(arcs, source, target)
    if not paths:
        return None
    return min(paths)


def exhaustive_distance(arcs, source, target):
    best = best_simple_path(arcs, source, target)
    return math.inf if best is None else best[0]


def walk_opportunity(arcs, walk, cmp_target):
    """Opportunity of an explicit walk towards cmp_target, with the
    distance map recomputed by exhaustive path enumeration."""
    weight = {(u, v): w for u, outs in arcs.items() for v, w in outs}
    total = sum(weight[(u, v)] for u, v in zip(walk, walk[1:]))
    dist = [exhaustive_distance(arcs, v, cmp_target) for v in walk]
    acc = 0.0
    for i in range(1, len(walk)):
        if not dist[i] < dist[i - 1]:
            break
        acc += weight[(walk[i - 1], walk[i])]
    return acc / total


def reference_opportunity(arcs, factual, ref_target, cmp_target):
    """Full Alg-5 oracle: optimal path by enumeration, then the walk."""
    best = best_simple_path(arcs, factual, ref_target)
    assert best is not None
    return walk_opportunity(arcs, list(best[1]), cmp_target)
