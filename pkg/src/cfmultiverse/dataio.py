"""Tabular data loading, feature schemas and unit-interval encoding.

Everything downstream operates on an encoded matrix: numeric columns
min-max scaled to [0, 1], categoricals one-hot expanded.  The schema
carries per-feature monotonicity and mutability used as edge
constraints when the neighbourhood graph is built.
"""

import csv
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

KINDS = ("numeric", "categorical")
MONOTONICITY = ("free", "non-decreasing", "non-increasing")


class DataError(ValueError):
    """Raised for malformed input files or inconsistent schemas."""


@dataclass
class FeatureSpec:
    name: str
    kind: str
    monotonicity: str = "free"
    mutable: bool = True
    # filled in by encode_and_scale, first-seen order
    categories: list | None = None
    # numeric scaling fitted by encode_and_scale
    low: float | None = None
    high: float | None = None

    def validate(self):
        if self.kind not in KINDS:
            raise DataError(f"feature {self.name!r}: unknown kind {self.kind!r}")
        if self.monotonicity not in MONOTONICITY:
            raise DataError(
                f"feature {self.name!r}: unknown monotonicity {self.monotonicity!r}"
            )
        if self.kind == "categorical" and self.monotonicity != "free":
            raise DataError(
                f"feature {self.name!r}: categorical features cannot be monotonic"
            )


@dataclass
class FeatureSchema:
    features: list

    def __post_init__(self):
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise DataError(f"duplicate feature names: {dupes}")
        for f in self.features:
            f.validate()

    def names(self):
        return [f.name for f in self.features]

    def __getitem__(self, name):
        for f in self.features:
            if f.name == name:
                return f
        raise KeyError(name)


def load_schema(path):
    """Read a schema document: {"features": {name: {kind, monotonicity, mutable}}}.

    Feature order follows document order.  Missing monotonicity defaults
    to "free", missing mutable to true.
    """
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "features" not in doc:
        raise DataError(f"{path}: expected an object with a 'features' key")
    feats = doc["features"]
    if not isinstance(feats, dict) or not feats:
        raise DataError(f"{path}: 'features' must be a non-empty mapping")
    specs = []
    for name, meta in feats.items():
        if not isinstance(meta, dict):
            raise DataError(f"{path}: feature {name!r} must map to an object")
        unknown = set(meta) - {"kind", "monotonicity", "mutable"}
        if unknown:
            raise DataError(f"{path}: feature {name!r} has unknown keys {sorted(unknown)}")
        specs.append(
            FeatureSpec(
                name=name,
                kind=meta.get("kind", "numeric"),
                monotonicity=meta.get("monotonicity", "free"),
                mutable=bool(meta.get("mutable", True)),
            )
        )
    return FeatureSchema(specs)


@dataclass
class Dataset:
    """Rows plus labels.  Either raw (column dict) or encoded (float matrix).

    Encoded datasets expose:
      instances       (n, m) float64 matrix, every value in [0, 1]
      column_names    encoded column names, "feature" or "feature=category"
      encoded_to_raw  per column: (raw feature name, category or None)
    """

    schema: FeatureSchema
    labels: list
    encoded: bool = False
    raw_columns: dict | None = None
    instances: np.ndarray | None = None
    column_names: list = field(default_factory=list)
    encoded_to_raw: list = field(default_factory=list)

    @property
    def n_rows(self):
        return len(self.labels)

    def classes(self):
        return class_order(set(self.labels))

    def column_constraints(self):
        """Per encoded column: (monotonicity, mutable)."""
        if not self.encoded:
            raise DataError("constraints are defined on encoded data only")
        out = []
        for name, cat in self.encoded_to_raw:
            spec = self.schema[name]
            mono = "free" if cat is not None else spec.monotonicity
            out.append((mono, spec.mutable))
        return out


def class_order(labels):
    """Deterministic class ordering: numeric if every label parses, else lexicographic."""
    labels = list(labels)
    try:
        return sorted(labels, key=lambda s: (float(s), s))
    except ValueError:
        return sorted(labels)


def load_csv(path, schema, label_column):
    """Read a CSV with a header row into a raw Dataset.

    Every schema feature and the label column must be present. Numeric
    cells must parse as finite floats; failures point at the offending
    row and column.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        header = [h.strip() for h in reader.fieldnames]
        missing = [n for n in schema.names() + [label_column] if n not in header]
        if missing:
            raise DataError(f"{path}: missing columns {missing}")
        columns = {name: [] for name in schema.names()}
        labels = []
        for idx, row in enumerate(reader):
            row = {(k.strip() if k else k): v for k, v in row.items()}
            for spec in schema.features:
                cell = row.get(spec.name)
                if cell is None:
                    raise DataError(f"{path}: row {idx}: missing value for {spec.name!r}")
                cell = cell.strip()
                if spec.kind == "numeric":
                    try:
                        value = float(cell)
                    except ValueError:
                        raise DataError(
                            f"{path}: row {idx}, column {spec.name!r}: "
                            f"cannot parse {cell!r} as a number"
                        ) from None
                    if not math.isfinite(value):
                        raise DataError(
                            f"{path}: row {idx}, column {spec.name!r}: non-finite value {cell!r}"
                        )
                    columns[spec.name].append(value)
                else:
                    columns[spec.name].append(cell)
            labels.append(row[label_column].strip())
    if not labels:
        raise DataError(f"{path}: no data rows")
    return Dataset(schema=schema, labels=labels, raw_columns=columns)


def encode_and_scale(data):
    """Encode a raw Dataset: numerics min-max scaled to [0,1], categoricals one-hot.

    Idempotent: an already-encoded dataset is returned unchanged.
    Categorical vocabularies are recorded on the schema in first-seen
    order, so the first observed category owns the first one-hot column.
    A constant numeric column scales to 0.
    """
    if data.encoded:
        return data
    n = data.n_rows
    fitted = []
    cols = []
    names = []
    mapping = []
    for spec in data.schema.features:
        raw = data.raw_columns[spec.name]
        if spec.kind == "numeric":
            arr = np.asarray(raw, dtype=float)
            lo, hi = float(arr.min()), float(arr.max())
            span = hi - lo
            scaled = np.zeros(n) if span == 0 else (arr - lo) / span
            fitted.append(replace(spec, low=lo, high=hi))
            cols.append(scaled)
            names.append(spec.name)
            mapping.append((spec.name, None))
        else:
            vocab = []
            for v in raw:
                if v not in vocab:
                    vocab.append(v)
            fitted.append(replace(spec, categories=vocab))
            for cat in vocab:
                cols.append(np.asarray([1.0 if v == cat else 0.0 for v in raw]))
                names.append(f"{spec.name}={cat}")
                mapping.append((spec.name, cat))
    matrix = np.column_stack(cols)
    return Dataset(
        schema=FeatureSchema(fitted),
        labels=list(data.labels),
        encoded=True,
        instances=matrix,
        column_names=names,
        encoded_to_raw=mapping,
    )


def encode_instance(data, raw_values):
    """Encode one raw instance {feature: value} against a fitted encoded Dataset.

    An unseen category is an error: the encoding has no column for it.
    """
    if not data.encoded:
        raise DataError("encode_instance needs an encoded dataset")
    out = []
    for spec in data.schema.features:
        if spec.name not in raw_values:
            raise DataError(f"missing value for feature {spec.name!r}")
        value = raw_values[spec.name]
        if spec.kind == "numeric":
            value = float(value)
            if not math.isfinite(value):
                raise DataError(f"feature {spec.name!r}: non-finite value")
            span = spec.high - spec.low
            out.append(0.0 if span == 0 else (value - spec.low) / span)
        else:
            if value not in spec.categories:
                raise DataError(
                    f"feature {spec.name!r}: unseen category {value!r} "
                    f"(known: {spec.categories})"
                )
            out.extend(1.0 if value == cat else 0.0 for cat in spec.categories)
    return np.asarray(out, dtype=float)
