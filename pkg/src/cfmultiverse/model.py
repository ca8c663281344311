"""Classifier access for candidate selection and branching factors.

Two concrete models: a k-NN fit on the encoded dataset, and a frozen
prediction table loaded from file for externally scored data.  Both
expose the same trio: classes(), predict(x), predict_proba(x, class).
"""

import csv
import math

import numpy as np

from .dataio import DataError, class_order


class ModelError(ValueError):
    pass


class KnnClassifier:
    """Majority vote over the k_model nearest training rows (L2).

    Neighbour ties at the cut-off resolve to the smaller row index;
    vote ties resolve to the smaller class id under class_order.  A
    query equal to a training row counts that row among its own
    neighbours.
    """

    def __init__(self, instances, labels, k_model):
        instances = np.asarray(instances, dtype=float)
        if k_model < 1 or k_model > len(labels):
            raise ModelError(
                f"k_model must be in [1, {len(labels)}], got {k_model}"
            )
        self._x = instances
        self._labels = list(labels)
        self._classes = class_order(set(labels))
        self._index = {c: i for i, c in enumerate(self._classes)}
        self._label_codes = np.asarray([self._index[l] for l in labels])
        self.k_model = k_model

    def classes(self):
        return list(self._classes)

    def _neighbour_codes(self, x):
        d = np.linalg.norm(self._x - np.asarray(x, dtype=float), axis=1)
        # stable sort keeps row order among equal distances
        order = np.argsort(d, kind="stable")[: self.k_model]
        return self._label_codes[order]

    def _proba_row(self, x):
        codes = self._neighbour_codes(x)
        counts = np.bincount(codes, minlength=len(self._classes))
        return counts / self.k_model

    def predict(self, x):
        row = self._proba_row(x)
        # argmax takes the first maximum, i.e. the smallest class id
        return self._classes[int(np.argmax(row))]

    def predict_proba(self, x, target_class):
        if target_class not in self._index:
            raise ModelError(f"unknown class {target_class!r} (have {self._classes})")
        return float(self._proba_row(x)[self._index[target_class]])


class PredictionTable:
    """Frozen per-row class probabilities keyed by encoded instance.

    Built by load_predictions; queries must exactly match a dataset row.
    """

    def __init__(self, classes, rows, instances):
        self._classes = list(classes)
        self._index = {c: i for i, c in enumerate(self._classes)}
        self._rows = rows
        self._lookup = {}
        for i, inst in enumerate(instances):
            # first occurrence wins for duplicate rows
            self._lookup.setdefault(np.asarray(inst, dtype=float).tobytes(), i)

    def classes(self):
        return list(self._classes)

    def _row_for(self, x):
        key = np.asarray(x, dtype=float).tobytes()
        if key not in self._lookup:
            raise ModelError("instance is not a row of the scored dataset")
        return self._rows[self._lookup[key]]

    def predict(self, x):
        row = self._row_for(x)
        return self._classes[int(np.argmax(row))]

    def predict_proba(self, x, target_class):
        if target_class not in self._index:
            raise ModelError(f"unknown class {target_class!r} (have {self._classes})")
        return float(self._row_for(x)[self._index[target_class]])


ROW_SUM_TOL = 1e-6


def load_predictions(path, data):
    """Read a probability CSV (header = class ids, one row per dataset row).

    Validates shape against the dataset, probability bounds, and that
    each row sums to 1 within 1e-6.
    """
    if not data.encoded:
        raise DataError("load_predictions pairs with an encoded dataset")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ModelError(f"{path}: empty file") from None
        classes = [h.strip() for h in header]
        if len(set(classes)) != len(classes) or not classes:
            raise ModelError(f"{path}: class header must be non-empty and unique")
        rows = []
        for idx, row in enumerate(reader):
            if len(row) != len(classes):
                raise ModelError(
                    f"{path}: row {idx} has {len(row)} cells, expected {len(classes)}"
                )
            try:
                values = [float(c) for c in row]
            except ValueError:
                raise ModelError(f"{path}: row {idx}: non-numeric probability") from None
            for cls, v in zip(classes, values):
                if not math.isfinite(v) or v < 0.0 or v > 1.0:
                    raise ModelError(
                        f"{path}: row {idx}, class {cls!r}: probability {v} out of [0, 1]"
                    )
            total = sum(values)
            if abs(total - 1.0) > ROW_SUM_TOL:
                raise ModelError(
                    f"{path}: row {idx}: probabilities sum to {total}, expected 1"
                )
            rows.append(np.asarray(values))
    if len(rows) != data.n_rows:
        raise ModelError(
            f"{path}: {len(rows)} prediction rows for {data.n_rows} dataset rows"
        )
    order = class_order(classes)
    ordered = [np.asarray([r[classes.index(c)] for c in order]) for r in rows]
    return PredictionTable(order, ordered, data.instances)
