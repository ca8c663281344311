"""Synthetic fixtures used by the test-suite, docs and demos."""

import numpy as np

from .dataio import Dataset, FeatureSchema, FeatureSpec, encode_and_scale


def two_moons(n=400, noise=0.08, seed=0):
    """Two interleaved half-circles with Gaussian jitter, labels "0" and "1".

    Returns an encoded Dataset (features x1, x2 scaled to [0, 1]).
    Deterministic for a fixed seed.
    """
    if n < 2:
        raise ValueError("need at least one point per moon")
    rng = np.random.default_rng(seed)
    n0 = n // 2
    n1 = n - n0
    t0 = rng.uniform(0.0, np.pi, n0)
    t1 = rng.uniform(0.0, np.pi, n1)
    upper = np.column_stack([np.cos(t0), np.sin(t0)])
    lower = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    points = np.vstack([upper, lower]) + rng.normal(0.0, noise, (n, 2))
    labels = ["0"] * n0 + ["1"] * n1
    schema = FeatureSchema(
        [FeatureSpec("x1", "numeric"), FeatureSpec("x2", "numeric")]
    )
    raw = Dataset(
        schema=schema,
        labels=labels,
        raw_columns={"x1": points[:, 0].tolist(), "x2": points[:, 1].tolist()},
    )
    return encode_and_scale(raw)


def dataset_to_csv(data, path, label_column="label"):
    """Write a raw or encoded Dataset back out as a CSV with a header row."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if data.encoded:
            writer.writerow(data.column_names + [label_column])
            for row, label in zip(data.instances, data.labels):
                writer.writerow([repr(float(v)) for v in row] + [label])
        else:
            names = data.schema.names()
            writer.writerow(names + [label_column])
            for i, label in enumerate(data.labels):
                writer.writerow([data.raw_columns[n][i] for n in names] + [label])
