"""Command-line front door: build graphs, explain rows, compare paths, serve.

Every flag can also be set through the environment with the
CFMULTIVERSE_<COMMAND>_<FLAG> convention (click's auto-envvar naming).
All file output is written atomically: to a temp file in the target
directory, then renamed over the destination.

Exit codes: 1 validation or data errors, 2 I/O failures (and usage
errors), 3 no candidate counterfactuals at the requested threshold.
"""

import functools
import json
import os
import sys
import tempfile

import click
import numpy as np

from .bsp import BspError
from .dataio import DataError, encode_and_scale, load_csv, load_schema
from .evaluate import EvaluationConfig, rows_to_csv, run_evaluation
from .graph import (
    SCHEMA_VERSION,
    GraphError,
    build_multiverse,
    diverse_alternatives,
    graph_to_json,
    select_optimal,
)
from .model import KnnClassifier, ModelError, load_predictions
from .paths import (
    PathError,
    direction_difference,
    find_branching_point,
    load_path,
    normalize_path,
    opportunity_matrix,
    path_length,
)

EXIT_ERROR = 1
EXIT_IO = 2
EXIT_NO_CANDIDATES = 3


class NoCandidatesError(Exception):
    pass


def atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cfm-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def dump_json(doc):
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except NoCandidatesError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_NO_CANDIDATES)
        except (DataError, ModelError, GraphError, PathError, BspError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_ERROR)
        except OSError as exc:
            click.echo(f"io error: {exc}", err=True)
            sys.exit(EXIT_IO)

    return wrapper


def data_options(fn):
    fn = click.option("--data", "data_path", required=True, help="CSV with a header row.")(fn)
    fn = click.option("--schema", "schema_path", required=True, help="JSON feature schema.")(fn)
    fn = click.option("--label-column", default="label", show_default=True)(fn)
    fn = click.option(
        "--k-model",
        default=5,
        show_default=True,
        help="Neighbours for the built-in k-NN classifier.",
    )(fn)
    fn = click.option(
        "--predictions",
        "predictions_path",
        default=None,
        help="Per-row probability CSV; replaces the built-in classifier.",
    )(fn)
    return fn


def graph_options(fn):
    fn = click.option("--k", default=20, show_default=True, help="Out-arcs per vertex.")(fn)
    fn = click.option(
        "--lambda",
        "lam",
        default=1.0,
        show_default=True,
        help="Penalty factor for constrained feature moves.",
    )(fn)
    fn = click.option(
        "--threshold",
        "-t",
        default=0.5,
        show_default=True,
        help="Probability a row needs to count as a counterfactual.",
    )(fn)
    fn = click.option("--gamma", default=1.0, show_default=True, help="Branching discount.")(fn)
    fn = click.option("--target-class", default=None, help="Class to steer towards.")(fn)
    return fn


def load_inputs(data_path, schema_path, label_column, k_model, predictions_path):
    schema = load_schema(schema_path)
    data = encode_and_scale(load_csv(data_path, schema, label_column))
    if predictions_path:
        clf = load_predictions(predictions_path, data)
    else:
        clf = KnnClassifier(data.instances, data.labels, k_model)
    return data, clf


@click.group(context_settings={"auto_envvar_prefix": "CFMULTIVERSE"})
@click.version_option(package_name="cfmultiverse")
def main():
    """Counterfactual path geometry over dataset graphs."""


@main.command()
@data_options
@graph_options
@click.option("--factual", required=True, type=int, help="Row index to explain.")
@click.option("--output", "output_path", required=True, help="Graph JSON destination.")
@guarded
def build(data_path, schema_path, label_column, k_model, predictions_path,
          k, lam, threshold, gamma, target_class, factual, output_path):
    """Build the neighbourhood graph and per-candidate reports."""
    data, clf = load_inputs(data_path, schema_path, label_column, k_model, predictions_path)
    g = build_multiverse(
        data, clf, factual, k, threshold, lam, target_class=target_class, gamma=gamma
    )
    atomic_write(output_path, dump_json(graph_to_json(g)))
    if g.status == "no_candidates":
        raise NoCandidatesError("no rows reach the threshold for the target class")
    reachable = sum(1 for r in g.reports if r.reachable)
    click.echo(
        f"{output_path}: {g.n} vertices, {len(g.candidates)} candidates, "
        f"{reachable} reachable"
    )


@main.command()
@data_options
@graph_options
@click.option("--factual", required=True, type=int, help="Row index to explain.")
@click.option("--top-c", default=5, show_default=True, help="Pool size for selection.")
@click.option("--alt-count", default=5, show_default=True)
@click.option("--alt-separation", default=1.0, show_default=True)
@click.option("--output", "output_path", required=True, help="Report JSON destination.")
@guarded
def explain(data_path, schema_path, label_column, k_model, predictions_path,
            k, lam, threshold, gamma, target_class, factual,
            top_c, alt_count, alt_separation, output_path):
    """Select the best counterfactual journey for one row."""
    data, clf = load_inputs(data_path, schema_path, label_column, k_model, predictions_path)
    g = build_multiverse(
        data, clf, factual, k, threshold, lam, target_class=target_class, gamma=gamma
    )
    if g.status == "no_candidates":
        raise NoCandidatesError("no rows reach the threshold for the target class")
    alts = diverse_alternatives(g, g.reports, alt_count, alt_separation)
    selected = select_optimal(g, g.reports, top_c, alts)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "factual": factual,
        "target_class": g.target_class,
        "parameters": {
            "k": k,
            "lambda": lam,
            "threshold": threshold,
            "gamma": gamma,
            "top_c": top_c,
            "alt_count": alt_count,
            "alt_separation": alt_separation,
        },
        "alternatives": [int(a.target) for a in alts],
        "reports": [r.to_json() for r in g.reports],
        "selected": selected.to_json(),
    }
    atomic_write(output_path, dump_json(doc))
    click.echo(
        f"{output_path}: selected target {selected.target} "
        f"(distance {selected.distance:.6g}, opportunity {selected.opportunity:.6g})"
    )


@main.command()
@click.argument("paths", nargs=-1, required=True)
@click.option("--o", "o", default=10, show_default=True, help="Resampled points per path.")
@click.option("--epsilon", default=0.1, show_default=True, help="Branching tube radius.")
@click.option("--output", "output_path", required=True, help="Metrics JSON destination.")
@guarded
def pathmetrics(paths, o, epsilon, output_path):
    """Compare step-path files: direction differences, branching, opportunity.

    PATHS are two or more JSON files with "origin" and "steps".
    """
    if len(paths) < 2:
        raise PathError("need at least two path files to compare")
    loaded = []
    errors = []
    for name in paths:
        p = load_path(name)
        try:
            loaded.append((name, p, normalize_path(p, o)))
        except PathError as exc:
            errors.append({"path": name, "error": str(exc)})
    if loaded:
        origin = loaded[0][1].origin
        for name, p, _ in loaded[1:]:
            if not np.array_equal(p.origin, origin):
                raise PathError(
                    f"{name}: origin differs from {loaded[0][0]}; "
                    "paths must share their starting point"
                )
    names = [name for name, _, _ in loaded]
    norm = [q for _, _, q in loaded]
    m = len(norm)
    dd = [[0.0] * m for _ in range(m)]
    bp = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            dd[i][j] = direction_difference(norm[i], norm[j])
            bp[i][j] = find_branching_point(norm[i], norm[j], epsilon)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "o": o,
        "epsilon": epsilon,
        "paths": names,
        "lengths": [path_length(p) for _, p, _ in loaded],
        "errors": errors,
        "direction_difference": dd,
        "branching_points": bp,
    }
    if m >= 2:
        matrix, means = opportunity_matrix(
            norm[0].origin, [q.endpoint for q in norm]
        )
        doc["opportunity"] = {
            "matrix": [[float(v) for v in row] for row in matrix],
            "means": [float(v) for v in means],
        }
    atomic_write(output_path, dump_json(doc))
    click.echo(f"{output_path}: compared {m} paths ({len(errors)} skipped)")


@main.command()
@data_options
@graph_options
@click.option("--undesired-class", default=None, help="Class whose rows get explained.")
@click.option("--c-values", default="2,5,10", show_default=True,
              help="Comma-separated pool sizes for selection.")
@click.option("--alt-count", default=5, show_default=True)
@click.option("--alt-separation", default=1.0, show_default=True)
@click.option("--max-factuals", default=None, type=int)
@click.option("--seed", default=0, show_default=True, help="Reserved for sampling hooks.")
@click.option("--output", "output_path", required=True, help="Aggregate CSV destination.")
@guarded
def evaluate(data_path, schema_path, label_column, k_model, predictions_path,
             k, lam, threshold, gamma, target_class, undesired_class,
             c_values, alt_count, alt_separation, max_factuals, seed, output_path):
    """Compare nearest-counterfactual selection against opportunity-aware pools."""
    del seed  # evaluation is deterministic; flag kept for interface stability
    try:
        cs = tuple(int(v) for v in c_values.split(",") if v.strip())
    except ValueError:
        raise GraphError(f"cannot parse --c-values {c_values!r}") from None
    data, clf = load_inputs(data_path, schema_path, label_column, k_model, predictions_path)
    cfg = EvaluationConfig(
        k=k,
        t=threshold,
        lam=lam,
        gamma=gamma,
        target_class=target_class,
        undesired_class=undesired_class,
        c_values=cs,
        alt_count=alt_count,
        alt_separation=alt_separation,
        max_factuals=max_factuals,
    )
    rows, meta = run_evaluation(data, clf, cfg)
    atomic_write(output_path, rows_to_csv(rows))
    click.echo(
        f"{output_path}: {meta['evaluated']} factuals evaluated, "
        f"{meta['skipped']} skipped"
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--session-timeout", default=3600.0, show_default=True,
              help="Idle seconds before a session expires.")
@click.option("--persist", "persist_dir", default=None,
              help="Directory for session persistence across restarts.")
@click.option("--ui-dir", default=None, help="Static frontend bundle to serve at /.")
@guarded
def serve(host, port, session_timeout, persist_dir, ui_dir):
    """Run the navigation service."""
    import uvicorn

    from .service import create_app

    app = create_app(
        session_timeout=session_timeout, persist_dir=persist_dir, ui_dir=ui_dir
    )
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
