"""Shared fixtures: hand-built graphs and small datasets."""

import numpy as np
import pytest

from cfmultiverse.dataio import Dataset, FeatureSchema, FeatureSpec, encode_and_scale
from cfmultiverse.graph import MultiverseGraph


def symmetric_arcs(edges, n):
    """Adjacency dict with each undirected edge present in both directions,
    each vertex's list sorted by (weight, target)."""
    arcs = {v: [] for v in range(n)}
    for u, v, w in edges:
        arcs[u].append((v, float(w)))
        arcs[v].append((u, float(w)))
    for v in arcs:
        arcs[v].sort(key=lambda t: (t[1], t[0]))
    return arcs


@pytest.fixture
def three_exit_graph():
    """Seven vertices, three candidates with hand-computable opportunities.

    Vertex 0 is the factual; 1, 2 and 3 are candidates.  1 hangs off 0
    alone; 2 and 3 share the 0-4-5 trunk before splitting, with 3 close
    behind a cheap fork and 2 behind an expensive one.  Journey lengths:
    to 1: 5, to 2: 49 (0-4-5-2), to 3: 32 (0-4-5-6-3); the trunk 0-4-5
    costs 28.
    """
    edges = [
        (0, 1, 5.0),
        (0, 4, 16.0),
        (4, 5, 12.0),
        (5, 2, 21.0),
        (5, 6, 2.0),
        (6, 3, 2.0),
    ]
    arcs = symmetric_arcs(edges, 7)
    return MultiverseGraph(
        n=7, arcs=arcs, k=3, lam=1.0, t=0.5, candidates=[1, 2, 3], factual=0
    )


def dataset_1d(values, labels):
    """Encoded one-feature dataset from explicit values."""
    schema = FeatureSchema([FeatureSpec("x", "numeric")])
    raw = Dataset(schema=schema, labels=list(labels), raw_columns={"x": list(values)})
    return encode_and_scale(raw)


class FixedClassifier:
    """Test double: explicit labels and per-row target-class probabilities."""

    def __init__(self, instances, labels, proba, target):
        self._x = np.asarray(instances, dtype=float)
        self._labels = list(labels)
        self._proba = list(proba)
        self._target = target
        self._classes = sorted(set(labels) | {target})

    def classes(self):
        return list(self._classes)

    def _row(self, x):
        match = np.where((self._x == np.asarray(x, dtype=float)).all(axis=1))[0]
        if match.size == 0:
            raise ValueError("unknown instance")
        return int(match[0])

    def predict(self, x):
        return self._labels[self._row(x)]

    def predict_proba(self, x, target_class):
        if target_class not in self._classes:
            raise ValueError(f"unknown class {target_class!r}")
        if target_class == self._target:
            return self._proba[self._row(x)]
        return 1.0 - self._proba[self._row(x)]
