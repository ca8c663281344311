"""Directed neighbourhood graph over a dataset and path scoring on it.

Vertices are dataset rows; each vertex keeps outgoing arcs to its k
nearest rows under a monotonicity-aware distance.  Counterfactual
candidates are the vertices the classifier scores at or above a
probability threshold; journeys are shortest paths from the factual
vertex, scored by length, branching factor and opportunity potential.
"""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .dataio import class_order


class GraphError(ValueError):
    pass


SCHEMA_VERSION = "1"

_MONO_CODE = {"free": 0, "non-decreasing": 1, "non-increasing": -1}


def weighted_distance(a, b, lam):
    """Asymmetric L2 variant: coordinates that increase along a -> b cost lam times more.

    lam = 1 recovers the plain L2 distance exactly.
    """
    if lam < 0:
        raise GraphError("lambda must be non-negative")
    diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    scaled = np.where(diff < 0, lam * diff, diff)
    return float(np.sqrt(np.dot(scaled, scaled)))


def monotonicity_distance(a, b, constraints, lam):
    """Distance a -> b with per-column schema constraints.

    constraints: per encoded column, (monotonicity, mutable) as produced
    by Dataset.column_constraints().  Moves a non-decreasing column down
    (or a non-increasing column up) at factor lam; touching an immutable
    column makes the move impossible (+inf).  Free columns never pay
    the penalty, so an all-free schema is plain L2 for any lam.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(constraints) != a.shape[0]:
        raise GraphError(
            f"{len(constraints)} column constraints for {a.shape[0]} columns"
        )
    if lam < 0:
        raise GraphError("lambda must be non-negative")
    diff = a - b
    total = 0.0
    for i, (mono, mutable) in enumerate(constraints):
        d = diff[i]
        if not mutable and d != 0.0:
            return math.inf
        code = _MONO_CODE[mono]
        if (code == 1 and d > 0.0) or (code == -1 and d < 0.0):
            d *= lam
        total += d * d
    return math.sqrt(total)


def pairwise_distances(instances, constraints, lam):
    """Full (n, n) matrix of monotonicity_distance values, +inf diagonal."""
    x = np.asarray(instances, dtype=float)
    n = x.shape[0]
    mono = np.asarray([_MONO_CODE[m] for m, _ in constraints])
    immutable = np.asarray([not mut for _, mut in constraints])
    out = np.empty((n, n))
    for i in range(n):
        diff = x[i] - x
        pen = ((mono == 1) & (diff > 0)) | ((mono == -1) & (diff < 0))
        scaled = np.where(pen, lam * diff, diff)
        row = np.sqrt((scaled * scaled).sum(axis=1))
        if immutable.any():
            row[(diff[:, immutable] != 0).any(axis=1)] = np.inf
        out[i] = row
    np.fill_diagonal(out, np.inf)
    return out


@dataclass
class GraphPath:
    """A walk through the graph: vertices, per-arc weights, total length."""

    vertices: list
    edge_weights: list
    total_length: float

    def __post_init__(self):
        if len(self.edge_weights) != len(self.vertices) - 1:
            raise GraphError("edge_weights must have one entry per arc")

    def to_json(self):
        return {
            "vertices": [int(v) for v in self.vertices],
            "edge_weights": [float(w) for w in self.edge_weights],
            "total_length": float(self.total_length),
        }


@dataclass
class CounterfactualReport:
    """One candidate target: how to reach it and how it scores."""

    target: int
    reachable: bool
    distance: float | None = None
    path: GraphPath | None = None
    branching_factor: float | None = None
    opportunity: float | None = None

    def to_json(self):
        return {
            "target": int(self.target),
            "reachable": self.reachable,
            "distance": None if self.distance is None else float(self.distance),
            "path": None if self.path is None else self.path.to_json(),
            "branching_factor": (
                None if self.branching_factor is None else float(self.branching_factor)
            ),
            "opportunity": None if self.opportunity is None else float(self.opportunity),
        }


@dataclass
class MultiverseGraph:
    """The pruned digraph plus everything derived from it at build time.

    arcs maps vertex -> [(target, weight), ...] sorted by (weight,
    target).  instances/classes/branching are optional for purely
    structural graphs (tests, hand-built fixtures); the CLI and service
    always populate them.
    """

    n: int
    arcs: dict
    k: int
    lam: float
    t: float
    candidates: list
    target_class: str | None = None
    factual: int | None = None
    instances: np.ndarray | None = None
    classes: list | None = None
    branching: dict = field(default_factory=dict)
    status: str = "ok"
    reports: list = field(default_factory=list)
    _weight_of: dict = field(default_factory=dict, repr=False)
    _rev_arcs: dict | None = field(default=None, repr=False)
    _dist_to: dict = field(default_factory=dict, repr=False)
    _tree_from: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for u, outs in self.arcs.items():
            for v, w in outs:
                if not (0 <= v < self.n) or not (0 <= u < self.n):
                    raise GraphError(f"arc {u}->{v} out of range")
                if not math.isfinite(w) or w < 0:
                    raise GraphError(f"arc {u}->{v} has invalid weight {w}")
                self._weight_of[(u, v)] = w

    def weight(self, u, v):
        try:
            return self._weight_of[(u, v)]
        except KeyError:
            raise GraphError(f"no arc {u}->{v}") from None

    def reverse_arcs(self):
        if self._rev_arcs is None:
            rev = {v: [] for v in range(self.n)}
            for u, outs in self.arcs.items():
                for v, w in outs:
                    rev[v].append((u, w))
            self._rev_arcs = rev
        return self._rev_arcs


def _dijkstra_distances(adjacency, sources, n):
    """Plain distance map from a source set; +inf where unreachable."""
    dist = np.full(n, np.inf)
    heap = []
    for s in sources:
        dist[s] = 0.0
        heap.append((0.0, s))
    heapq.heapify(heap)
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for u, w in adjacency.get(v, ()):
            nd = d + w
            if nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def distances_to(g, target):
    """Shortest-path distance from every vertex to target (cached)."""
    if target not in g._dist_to:
        g._dist_to[target] = _dijkstra_distances(g.reverse_arcs(), [target], g.n)
    return g._dist_to[target]


def shortest_path_tree(g, source):
    """Minimal-weight path from source to every reachable vertex.

    Ties between equal-weight paths resolve to the lexicographically
    smallest vertex sequence, which is well defined here because arc
    weights are positive for distinct rows.
    """
    if source in g._tree_from:
        return g._tree_from[source]
    best = {source: (0.0, (source,))}
    done = {}
    heap = [(0.0, (source,))]
    while heap:
        d, path = heapq.heappop(heap)
        v = path[-1]
        if v in done:
            continue
        done[v] = (d, path)
        for u, w in g.arcs.get(v, ()):
            if u in done:
                continue
            cand = (d + w, path + (u,))
            if u not in best or cand < best[u]:
                best[u] = cand
                heapq.heappush(heap, cand)
    g._tree_from[source] = done
    return done


def shortest_path(g, source, target):
    """GraphPath from source to target, or None when unreachable."""
    if not (0 <= source < g.n and 0 <= target < g.n):
        raise GraphError("vertex out of range")
    tree = shortest_path_tree(g, source)
    if target not in tree:
        return None
    dist, path = tree[target]
    weights = [g.weight(u, v) for u, v in zip(path, path[1:])]
    return GraphPath(vertices=list(path), edge_weights=weights, total_length=dist)


def path_opportunity(g, walk, cmp_target):
    """Alg-style opportunity of an explicit walk towards a compare target.

    Accumulates arc weights while each next vertex sits strictly closer
    (graph distance) to cmp_target, then divides by the walk's total
    weight.  Returns (value, cmp_reachable); value is 0.0 with a False
    flag when cmp_target cannot be reached from any walk vertex.
    """
    if len(walk) < 2:
        raise GraphError("walk needs at least two vertices")
    weights = [g.weight(u, v) for u, v in zip(walk, walk[1:])]
    total = sum(weights)
    if total == 0.0:
        raise GraphError("walk has zero total weight; opportunity is undefined")
    dmap = distances_to(g, cmp_target)
    reachable = any(math.isfinite(dmap[v]) for v in walk)
    acc = 0.0
    prev = dmap[walk[0]]
    for i in range(1, len(walk)):
        cur = dmap[walk[i]]
        if not cur < prev:
            break
        acc += weights[i - 1]
        prev = cur
    return acc / total, reachable


def graph_opportunity_potential(g, factual, ref_target, cmp_target):
    """Fraction of the optimal journey to ref_target that also approaches cmp_target.

    In [0, 1]; exactly 1 when cmp_target == ref_target.  The reference
    target must be reachable from the factual vertex.
    """
    path = shortest_path(g, factual, ref_target)
    if path is None:
        raise GraphError(f"reference target {ref_target} unreachable from {factual}")
    value, _ = path_opportunity(g, path.vertices, cmp_target)
    return value


def node_branching_factors(g, classes, exclude, universe=None):
    """Per-vertex branching factor r = -log(c / max c), or None when undefined.

    c(v) is the mean graph distance from v to the nearest vertex of each
    class outside `exclude`; the max runs over vertices with finite c.
    None marks vertices where some class is unreachable, or where c is 0
    (the vertex already sits in an alternative class, log diverges).
    `universe` is the full class set (defaults to the classes present);
    a universe class with no predicted vertices is simply unreachable.
    """
    if universe is None:
        universe = set(classes)
    eval_classes = [y for y in class_order(universe) if y not in exclude]
    if not eval_classes:
        raise GraphError("no classes left to branch towards")
    rev = g.reverse_arcs()
    maps = []
    for y in eval_classes:
        sources = [v for v in range(g.n) if classes[v] == y]
        maps.append(_dijkstra_distances(rev, sources, g.n) if sources else np.full(g.n, np.inf))
    raw = np.vstack(maps).mean(axis=0)
    finite = raw[np.isfinite(raw) & (raw > 0)]
    if finite.size == 0:
        return {v: None for v in range(g.n)}
    cmax = float(finite.max())
    out = {}
    for v in range(g.n):
        c = raw[v]
        out[v] = None if not math.isfinite(c) or c <= 0.0 else float(-math.log(c / cmax))
    return out


def node_branching_factor(g, v, clf, exclude):
    """Branching factor of one vertex; predicts classes with clf on g.instances."""
    if g.instances is None:
        raise GraphError("graph carries no instances to classify")
    classes = [clf.predict(x) for x in g.instances]
    return node_branching_factors(g, classes, exclude)[v]


def path_branching_factor(path, factors, gamma=1.0):
    """Discounted mean branching factor over the interior vertices of a path.

    gamma discounts later interior vertices (exponent 0 at the first
    one).  Undefined per-vertex factors contribute 0.  Paths with no
    interior vertex have no defined value and raise.
    """
    if gamma < 0:
        raise GraphError("gamma must be non-negative")
    seq = path.vertices
    n = len(seq)
    if n < 3:
        raise GraphError("path branching factor needs at least one interior vertex")
    interior = seq[1:-1]
    total = 0.0
    for i, v in enumerate(interior):
        r = factors.get(v)
        if r is not None:
            total += (gamma ** i) * r
    return total / (n - 2)


def build_multiverse(data, clf, factual, k, t, lam, target_class=None, gamma=1.0):
    """Construct the neighbourhood graph and a report per candidate counterfactual.

    Candidates are rows whose probability of target_class reaches t.
    For binary problems target_class may be omitted (the class the
    factual row is not predicted as); multi-class requires it.  The
    factual row itself reaching the threshold is an error: there is
    nothing to explain.  Unreachable candidates stay in the report list
    with reachable=False.
    """
    if not data.encoded:
        raise GraphError("build_multiverse needs an encoded dataset")
    n = data.n_rows
    if not (0 <= factual < n):
        raise GraphError(f"factual index {factual} out of range for {n} rows")
    if k < 1 or k >= n:
        raise GraphError(f"k must be in [1, {n - 1}], got {k}")
    if not (0.0 < t <= 1.0):
        raise GraphError(f"threshold must be in (0, 1], got {t}")

    x = data.instances
    model_classes = clf.classes()
    predicted = [clf.predict(row) for row in x]
    factual_class = predicted[factual]
    if target_class is None:
        others = [c for c in model_classes if c != factual_class]
        if len(others) != 1:
            raise GraphError(
                "target_class is required when more than two classes are present"
            )
        target_class = others[0]
    elif target_class not in model_classes:
        raise GraphError(f"unknown target class {target_class!r}")
    if target_class == factual_class:
        raise GraphError("factual row is already predicted as the target class")

    if clf.predict_proba(x[factual], target_class) >= t:
        raise GraphError(
            "factual row already satisfies the threshold; nothing to explain"
        )

    dist = pairwise_distances(x, data.column_constraints(), lam)
    arcs = {}
    for i in range(n):
        order = np.argsort(dist[i], kind="stable")
        outs = []
        for j in order:
            if len(outs) == k:
                break
            if math.isfinite(dist[i, j]):
                outs.append((int(j), float(dist[i, j])))
        arcs[i] = outs

    candidates = [
        i for i in range(n) if clf.predict_proba(x[i], target_class) >= t
    ]

    if len(model_classes) == 2:
        exclude = {factual_class}
    else:
        exclude = {factual_class, target_class}

    g = MultiverseGraph(
        n=n,
        arcs=arcs,
        k=k,
        lam=float(lam),
        t=float(t),
        candidates=candidates,
        target_class=target_class,
        factual=factual,
        instances=x,
        classes=predicted,
    )
    g.branching = node_branching_factors(g, predicted, exclude, universe=model_classes)

    if not candidates:
        g.status = "no_candidates"
        return g

    g.reports = candidate_reports(g, factual, gamma)
    return g


def candidate_reports(g, factual, gamma=1.0):
    """One report per candidate for journeys starting at `factual`.

    Reachable reports come first, sorted by (distance, target);
    unreachable ones keep their target order at the end.
    """
    if not (0 <= factual < g.n):
        raise GraphError(f"factual index {factual} out of range")
    tree = shortest_path_tree(g, factual)
    reports = []
    for c in g.candidates:
        if c in tree:
            d, seq = tree[c]
            path = GraphPath(
                vertices=list(seq),
                edge_weights=[g.weight(u, v) for u, v in zip(seq, seq[1:])],
                total_length=d,
            )
            bf = None
            if len(seq) >= 3:
                bf = path_branching_factor(path, g.branching, gamma)
            reports.append(
                CounterfactualReport(
                    target=c, reachable=True, distance=d, path=path, branching_factor=bf
                )
            )
        else:
            reports.append(CounterfactualReport(target=c, reachable=False))
    reports.sort(
        key=lambda r: (not r.reachable, r.distance if r.reachable else 0.0, r.target)
    )
    return reports


def diverse_alternatives(g, reports, count, separation):
    """Greedy distance-ascending scan keeping reports at least `separation` apart (L2).

    Stops once `count` reports are kept; may return fewer when the
    candidate set is too tight.
    """
    if count < 1:
        raise GraphError("count must be >= 1")
    if separation < 0:
        raise GraphError("separation must be non-negative")
    if g.instances is None:
        raise GraphError("graph carries no instances to measure separation on")
    reach = sorted(
        (r for r in reports if r.reachable), key=lambda r: (r.distance, r.target)
    )
    kept = []
    for r in reach:
        xr = g.instances[r.target]
        if all(
            np.linalg.norm(xr - g.instances[a.target]) >= separation for a in kept
        ):
            kept.append(r)
            if len(kept) == count:
                break
    return kept


def select_optimal(g, reports, c, alternatives):
    """Pick, among the c closest reachable reports, the one with best opportunity.

    Opportunity of a candidate is the mean graph opportunity potential
    of its optimal journey towards each alternative target other than
    itself (0.0 when no such alternatives exist).  Ties resolve to the
    smaller distance, then the smaller target index.  The evaluated
    reports get their .opportunity field filled in.
    """
    if c < 1:
        raise GraphError("c must be >= 1")
    reach = sorted(
        (r for r in reports if r.reachable), key=lambda r: (r.distance, r.target)
    )
    if not reach:
        raise GraphError("no reachable candidates to select from")
    pool = reach[:c]
    factual = pool[0].path.vertices[0]
    for r in pool:
        others = [a.target for a in alternatives if a.target != r.target]
        if others:
            values = [
                graph_opportunity_potential(g, factual, r.target, t) for t in others
            ]
            r.opportunity = float(np.mean(values))
        else:
            r.opportunity = 0.0
    return max(pool, key=lambda r: (r.opportunity, -r.distance, -r.target))


def graph_to_json(g):
    """Serializable document for file export and the navigation service."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "vertices": list(range(g.n)),
        "arcs": [
            {"from": int(u), "to": int(v), "weight": float(w)}
            for u in range(g.n)
            for v, w in g.arcs.get(u, ())
        ],
        "k": int(g.k),
        "lambda": float(g.lam),
        "t": float(g.t),
        "candidates": [int(c) for c in g.candidates],
        "target_class": g.target_class,
        "factual": None if g.factual is None else int(g.factual),
        "status": g.status,
        "classes": g.classes,
        "instances": (
            None
            if g.instances is None
            else [[float(v) for v in row] for row in g.instances]
        ),
        "branching": [
            None if g.branching.get(v) is None else float(g.branching[v])
            for v in range(g.n)
        ],
        "reports": [r.to_json() for r in g.reports],
    }
    return doc


def _path_from_json(doc):
    return GraphPath(
        vertices=[int(v) for v in doc["vertices"]],
        edge_weights=[float(w) for w in doc["edge_weights"]],
        total_length=float(doc["total_length"]),
    )


def graph_from_json(doc):
    """Parse and validate a graph document produced by graph_to_json."""
    try:
        n = len(doc["vertices"])
        arcs = {}
        for arc in doc["arcs"]:
            u, v, w = int(arc["from"]), int(arc["to"]), float(arc["weight"])
            arcs.setdefault(u, []).append((v, w))
        g = MultiverseGraph(
            n=n,
            arcs=arcs,
            k=int(doc["k"]),
            lam=float(doc["lambda"]),
            t=float(doc["t"]),
            candidates=[int(c) for c in doc["candidates"]],
            target_class=doc.get("target_class"),
            factual=doc.get("factual"),
            instances=(
                None
                if doc.get("instances") is None
                else np.asarray(doc["instances"], dtype=float)
            ),
            classes=doc.get("classes"),
            status=doc.get("status", "ok"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(f"malformed graph document: {exc}") from exc
    branching = doc.get("branching")
    if branching is not None:
        g.branching = {
            v: (None if branching[v] is None else float(branching[v]))
            for v in range(n)
        }
    for rdoc in doc.get("reports", ()):
        g.reports.append(
            CounterfactualReport(
                target=int(rdoc["target"]),
                reachable=bool(rdoc["reachable"]),
                distance=None if rdoc["distance"] is None else float(rdoc["distance"]),
                path=None if rdoc["path"] is None else _path_from_json(rdoc["path"]),
                branching_factor=(
                    None
                    if rdoc["branching_factor"] is None
                    else float(rdoc["branching_factor"])
                ),
                opportunity=(
                    None if rdoc.get("opportunity") is None else float(rdoc["opportunity"])
                ),
            )
        )
    for c in g.candidates:
        if not (0 <= c < n):
            raise GraphError(f"candidate {c} out of range")
    return g
