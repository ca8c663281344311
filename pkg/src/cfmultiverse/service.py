"""HTTP navigation service: upload graphs, open sessions, step through them.

The service owns all computation; clients only render what it returns.
Sessions are in-memory (optionally persisted to disk), mutate under a
per-session lock, and expire after an idle timeout.  Every response
carries schema_version.
"""

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Request
from pydantic import BaseModel

from .graph import (
    SCHEMA_VERSION,
    GraphError,
    GraphPath,
    distances_to,
    graph_from_json,
    path_opportunity,
    shortest_path,
)


def project_2d(instances):
    """Per-vertex display coordinates: raw for 2-D data, else the first two
    principal directions fitted once at upload."""
    x = np.asarray(instances, dtype=float)
    if x.shape[1] == 2:
        return x.copy()
    centered = x - x.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    comps = vt[:2]
    # fix the sign convention so the projection is deterministic
    for row in comps:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1
    return centered @ comps.T


@dataclass
class GraphRecord:
    graph: object
    projection: np.ndarray
    _reach_cache: dict = field(default_factory=dict)

    def reachable_candidates(self, v):
        """Candidate vertices reachable from v by directed arcs (cached)."""
        if v not in self._reach_cache:
            seen = {v}
            stack = [v]
            while stack:
                u = stack.pop()
                for w, _ in self.graph.arcs.get(u, ()):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            self._reach_cache[v] = sorted(seen & set(self.graph.candidates))
        return self._reach_cache[v]


@dataclass
class SessionRecord:
    session_id: str
    graph_id: str
    history: list
    complete: bool = False
    created: float = 0.0
    updated: float = 0.0
    optimal: GraphPath | None = None
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def current(self):
        return self.history[-1]["vertex"]

    @property
    def total_weight(self):
        return sum(h["edge_weight"] or 0.0 for h in self.history)


class SessionRequest(BaseModel):
    graph_id: str
    factual: int


class StepRequest(BaseModel):
    neighbor: int
    version: int


def create_app(session_timeout=3600.0, persist_dir=None, ui_dir=None, clock=time.time):
    app = FastAPI(title="counterfactual navigation service")
    graphs = {}
    sessions = {}
    store_lock = threading.Lock()

    def persist_path(kind, ident):
        return os.path.join(persist_dir, kind, f"{ident}.json")

    def persist_graph(gid, doc):
        if persist_dir is None:
            return
        os.makedirs(os.path.join(persist_dir, "graphs"), exist_ok=True)
        with open(persist_path("graphs", gid), "w") as fh:
            json.dump(doc, fh)

    def persist_session(s):
        if persist_dir is None:
            return
        os.makedirs(os.path.join(persist_dir, "sessions"), exist_ok=True)
        doc = {
            "session_id": s.session_id,
            "graph_id": s.graph_id,
            "history": s.history,
            "complete": s.complete,
            "created": s.created,
            "updated": s.updated,
        }
        with open(persist_path("sessions", s.session_id), "w") as fh:
            json.dump(doc, fh)

    def drop_session(s):
        sessions.pop(s.session_id, None)
        if persist_dir is not None:
            try:
                os.unlink(persist_path("sessions", s.session_id))
            except OSError:
                pass

    def restore():
        if persist_dir is None:
            return
        gdir = os.path.join(persist_dir, "graphs")
        if os.path.isdir(gdir):
            for name in sorted(os.listdir(gdir)):
                if not name.endswith(".json"):
                    continue
                with open(os.path.join(gdir, name)) as fh:
                    doc = json.load(fh)
                gid = name[:-5]
                graphs[gid] = GraphRecord(
                    graph=graph_from_json(doc),
                    projection=project_2d(doc["instances"]),
                )
        sdir = os.path.join(persist_dir, "sessions")
        if os.path.isdir(sdir):
            for name in sorted(os.listdir(sdir)):
                if not name.endswith(".json"):
                    continue
                with open(os.path.join(sdir, name)) as fh:
                    doc = json.load(fh)
                if doc["graph_id"] not in graphs:
                    continue
                s = SessionRecord(
                    session_id=doc["session_id"],
                    graph_id=doc["graph_id"],
                    history=doc["history"],
                    complete=doc["complete"],
                    created=doc["created"],
                    updated=doc["updated"],
                )
                s.optimal = compute_optimal(graphs[s.graph_id].graph, s.history[0]["vertex"])
                sessions[s.session_id] = s

    def compute_optimal(g, factual):
        """Shortest journey from factual to its closest reachable candidate."""
        best = None
        for c in g.candidates:
            p = shortest_path(g, factual, c)
            if p is None:
                continue
            key = (p.total_length, c)
            if best is None or key < best[0]:
                best = (key, p)
        return None if best is None else best[1]

    def get_graph(gid):
        rec = graphs.get(gid)
        if rec is None:
            raise HTTPException(status_code=404, detail=f"unknown graph {gid}")
        return rec

    def get_session(sid):
        s = sessions.get(sid)
        if s is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid}")
        if clock() - s.updated > session_timeout:
            drop_session(s)
            raise HTTPException(status_code=404, detail=f"session {sid} expired")
        return s

    def previews_for(rec, v):
        g = rec.graph
        candidates = set(g.candidates)
        here = len(rec.reachable_candidates(v))
        out = []
        for u, w in g.arcs.get(v, ()):
            reach = rec.reachable_candidates(u)
            opportunity = {}
            for tau in sorted(candidates):
                opportunity[str(tau)] = pathless_gain(g, v, u, tau)
            out.append(
                {
                    "neighbor": int(u),
                    "edge_weight": float(w),
                    "candidate": u in candidates,
                    "reachable_candidates": len(reach),
                    "delta_reachable": len(reach) - here,
                    "branching_factor": g.branching.get(u),
                    "opportunity_to_each_target": opportunity,
                }
            )
        return out

    def pathless_gain(g, v, u, tau):
        """Single-arc opportunity: does stepping v->u strictly approach tau?"""
        dmap = distances_to(g, tau)
        return 1.0 if dmap[u] < dmap[v] else 0.0

    def session_doc(rec, s):
        g = rec.graph
        doc = {
            "schema_version": SCHEMA_VERSION,
            "session_id": s.session_id,
            "graph_id": s.graph_id,
            "current": int(s.current),
            "complete": s.complete,
            "version": len(s.history),
            "history": s.history,
            "total_weight": s.total_weight,
            "previews": [] if s.complete else previews_for(rec, s.current),
            "completion": None,
        }
        if s.complete:
            walk = [h["vertex"] for h in s.history]
            realized = GraphPath(
                vertices=walk,
                edge_weights=[h["edge_weight"] for h in s.history[1:]],
                total_length=s.total_weight,
            )
            completion = {
                "reached": int(s.current),
                "realized": realized.to_json(),
                "optimal": None if s.optimal is None else s.optimal.to_json(),
            }
            if s.optimal is not None and s.optimal.total_length > 0:
                completion["distance_ratio"] = realized.total_length / s.optimal.total_length
                value, _ = path_opportunity(g, walk, s.optimal.vertices[-1])
                completion["opportunity_vs_optimal"] = value
            doc["completion"] = completion
        return doc

    @app.post("/graphs")
    async def upload_graph(request: Request):
        try:
            doc = await request.json()
        except json.JSONDecodeError:
            raise HTTPException(status_code=400, detail="body is not valid JSON") from None
        try:
            g = graph_from_json(doc)
        except GraphError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        if g.instances is None:
            raise HTTPException(
                status_code=400, detail="graph document carries no instances"
            )
        gid = uuid.uuid4().hex[:12]
        rec = GraphRecord(graph=g, projection=project_2d(g.instances))
        with store_lock:
            graphs[gid] = rec
        persist_graph(gid, doc)
        return {
            "schema_version": SCHEMA_VERSION,
            "graph_id": gid,
            "vertices": g.n,
            "candidates": len(g.candidates),
        }

    @app.get("/graphs/{gid}/summary")
    def graph_summary(gid: str):
        rec = get_graph(gid)
        g = rec.graph
        candidates = set(g.candidates)
        vertices = []
        for v in range(g.n):
            vertices.append(
                {
                    "id": v,
                    "x": float(rec.projection[v][0]),
                    "y": float(rec.projection[v][1]),
                    "class": None if g.classes is None else g.classes[v],
                    "candidate": v in candidates,
                    "branching_factor": g.branching.get(v),
                }
            )
        return {
            "schema_version": SCHEMA_VERSION,
            "graph_id": gid,
            "k": g.k,
            "lambda": g.lam,
            "t": g.t,
            "status": g.status,
            "target_class": g.target_class,
            "factual": g.factual,
            "candidates": sorted(candidates),
            "vertices": vertices,
            "arcs": [
                {"from": u, "to": v, "weight": float(w)}
                for u in range(g.n)
                for v, w in g.arcs.get(u, ())
            ],
        }

    @app.post("/sessions")
    def create_session(body: SessionRequest):
        rec = get_graph(body.graph_id)
        g = rec.graph
        if not (0 <= body.factual < g.n):
            raise HTTPException(status_code=400, detail="factual vertex out of range")
        if body.factual in set(g.candidates):
            raise HTTPException(
                status_code=400,
                detail="factual vertex is already a candidate; nothing to navigate",
            )
        now = clock()
        s = SessionRecord(
            session_id=uuid.uuid4().hex[:12],
            graph_id=body.graph_id,
            history=[{"vertex": body.factual, "edge_weight": None}],
            created=now,
            updated=now,
        )
        s.optimal = compute_optimal(g, body.factual)
        with store_lock:
            sessions[s.session_id] = s
        persist_session(s)
        return session_doc(rec, s)

    @app.get("/sessions/{sid}")
    def read_session(sid: str):
        s = get_session(sid)
        return session_doc(graphs[s.graph_id], s)

    @app.get("/sessions/{sid}/previews")
    def read_previews(sid: str):
        s = get_session(sid)
        rec = graphs[s.graph_id]
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": sid,
            "current": int(s.current),
            "complete": s.complete,
            "previews": [] if s.complete else previews_for(rec, s.current),
        }

    @app.post("/sessions/{sid}/step")
    def step_session(sid: str, body: StepRequest):
        s = get_session(sid)
        rec = graphs[s.graph_id]
        g = rec.graph
        with s.lock:
            if s.complete:
                raise HTTPException(status_code=409, detail="session already complete")
            if body.version != len(s.history):
                raise HTTPException(
                    status_code=409,
                    detail=(
                        f"version conflict: session is at {len(s.history)}, "
                        f"request expected {body.version}"
                    ),
                )
            current = s.current
            weight = dict(g.arcs.get(current, ()))
            if body.neighbor not in weight:
                raise HTTPException(
                    status_code=400,
                    detail=f"vertex {body.neighbor} is not a neighbour of {current}",
                )
            s.history.append(
                {"vertex": int(body.neighbor), "edge_weight": float(weight[body.neighbor])}
            )
            if body.neighbor in set(g.candidates):
                s.complete = True
            s.updated = clock()
            persist_session(s)
        return session_doc(rec, s)

    restore()

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
