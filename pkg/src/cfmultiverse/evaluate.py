"""Strategy comparison: nearest counterfactual vs. opportunity-aware selection.

For every eligible factual row the harness builds the candidate
reports, picks a counterfactual per strategy and records its journey
length, endpoint L2 gap and opportunity score.  Strategies share one
graph; only the Dijkstra tree per factual differs.
"""

import io
from dataclasses import dataclass, field

import numpy as np

from .graph import (
    GraphError,
    build_multiverse,
    candidate_reports,
    diverse_alternatives,
    select_optimal,
)


@dataclass
class EvaluationConfig:
    k: int = 20
    t: float = 0.5
    lam: float = 1.0
    gamma: float = 1.0
    target_class: str | None = None
    undesired_class: str | None = None
    c_values: tuple = (2, 5, 10)
    alt_count: int = 5
    alt_separation: float = 1.0
    max_factuals: int | None = None


@dataclass
class StrategyRow:
    strategy: str
    n: int = 0
    distances: list = field(default_factory=list)
    l2: list = field(default_factory=list)
    opportunities: list = field(default_factory=list)

    def record(self, distance, l2, opportunity):
        self.n += 1
        self.distances.append(distance)
        self.l2.append(l2)
        self.opportunities.append(opportunity)


def run_evaluation(data, clf, cfg):
    """Returns (rows, meta): per-strategy StrategyRow plus run bookkeeping.

    Eligible factuals: rows predicted as the undesired class that are
    not candidates themselves.  Factuals with no reachable candidate are
    counted as skipped.
    """
    for c in cfg.c_values:
        if c < 1:
            raise GraphError(f"c values must be >= 1, got {c}")
    predicted = [clf.predict(x) for x in data.instances]
    undesired = cfg.undesired_class
    if undesired is None:
        classes = clf.classes()
        if len(classes) != 2 or cfg.target_class is None:
            raise GraphError(
                "undesired_class is required unless the task is binary with a target"
            )
        undesired = next(c for c in classes if c != cfg.target_class)

    seed = next(
        (
            i
            for i in range(data.n_rows)
            if predicted[i] == undesired
            and clf.predict_proba(data.instances[i], _target(cfg, clf, undesired)) < cfg.t
        ),
        None,
    )
    if seed is None:
        raise GraphError(f"no row is predicted as class {undesired!r} below the threshold")
    g = build_multiverse(
        data,
        clf,
        seed,
        cfg.k,
        cfg.t,
        cfg.lam,
        target_class=cfg.target_class,
        gamma=cfg.gamma,
    )
    if g.status == "no_candidates":
        raise GraphError("no candidate counterfactuals at this threshold")

    factuals = [
        v
        for v in range(g.n)
        if predicted[v] == undesired and v not in set(g.candidates)
    ]
    if cfg.max_factuals is not None:
        factuals = factuals[: cfg.max_factuals]

    strategies = ["nearest"] + [f"select_c{c}" for c in cfg.c_values]
    rows = {s: StrategyRow(s) for s in strategies}
    skipped = 0
    for f in factuals:
        reports = candidate_reports(g, f, cfg.gamma)
        if not any(r.reachable for r in reports):
            skipped += 1
            continue
        alts = diverse_alternatives(g, reports, cfg.alt_count, cfg.alt_separation)
        for name, c in [("nearest", 1)] + [
            (f"select_c{c}", c) for c in cfg.c_values
        ]:
            sel = select_optimal(g, reports, c, alts)
            l2 = float(np.linalg.norm(g.instances[f] - g.instances[sel.target]))
            rows[name].record(sel.distance, l2, sel.opportunity)
    meta = {
        "factuals": len(factuals),
        "evaluated": len(factuals) - skipped,
        "skipped": skipped,
        "target_class": g.target_class,
        "undesired_class": undesired,
    }
    return [rows[s] for s in strategies], meta


def _target(cfg, clf, undesired):
    if cfg.target_class is not None:
        return cfg.target_class
    return next(c for c in clf.classes() if c != undesired)


def rows_to_csv(rows):
    """Fixed-format CSV: one line per strategy, repr-formatted floats."""
    buf = io.StringIO()
    buf.write(
        "strategy,n,distance_mean,distance_std,l2_mean,l2_std,"
        "opportunity_mean,opportunity_std\n"
    )
    for row in rows:
        cells = [row.strategy, str(row.n)]
        for values in (row.distances, row.l2, row.opportunities):
            if row.n:
                arr = np.asarray(values)
                cells.extend([repr(float(arr.mean())), repr(float(arr.std()))])
            else:
                cells.extend(["", ""])
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()
