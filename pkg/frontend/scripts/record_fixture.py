"""Record service fixtures for the frontend contract tests.

Boots the real HTTP service, uploads a deterministic graph, walks one
step and saves the responses under frontend/fixtures/. Rerun whenever
the service schema changes:

    python3 scripts/record_fixture.py
"""

import json
import pathlib
import subprocess
import sys
import time
import urllib.error
import urllib.request

PORT = 8431
BASE = f"http://127.0.0.1:{PORT}"
OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def call(method, path, body=None):
    req = urllib.request.Request(
        BASE + path,
        data=None if body is None else json.dumps(body).encode(),
        headers={"content-type": "application/json"},
        method=method,
    )
    with urllib.request.urlopen(req) as r:
        return json.load(r)


def wait_ready(proc, attempts=50):
    for _ in range(attempts):
        if proc.poll() is not None:
            raise RuntimeError("server exited before becoming ready")
        try:
            urllib.request.urlopen(BASE + "/graphs/none/summary", timeout=0.5)
            return
        except urllib.error.HTTPError:
            return  # 404 means the app is up
        except OSError:
            time.sleep(0.2)
    raise RuntimeError("server did not come up")


def main():
    from cfmultiverse.datasets import two_moons
    from cfmultiverse.graph import build_multiverse, graph_to_json
    from cfmultiverse.model import KnnClassifier

    data = two_moons(n=200, seed=55)
    clf = KnnClassifier(data.instances, data.labels, 7)
    g = build_multiverse(data, clf, 0, k=12, t=0.7, lam=1.0)

    proc = subprocess.Popen(
        [sys.executable, "-m", "cfmultiverse.cli", "serve", "--port", str(PORT)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    try:
        wait_ready(proc)
        gid = call("POST", "/graphs", graph_to_json(g))["graph_id"]
        candidates = set(g.candidates)
        factual = next(
            v for v in range(g.n) if g.classes[v] == "0" and v not in candidates
        )
        doc = call("POST", "/sessions", {"graph_id": gid, "factual": factual})
        sid = doc["session_id"]
        # one legal, non-completing step so previews stay populated
        nxt = next(p["neighbor"] for p in doc["previews"] if not p["candidate"])
        doc = call("POST", f"/sessions/{sid}/step", {"neighbor": nxt, "version": doc["version"]})
        assert not doc["complete"], "fixture session must stay open"
        assert doc["previews"], "fixture session must carry previews"

        OUT.mkdir(exist_ok=True)
        summary = call("GET", f"/graphs/{gid}/summary")
        previews = call("GET", f"/sessions/{sid}/previews")
        for name, payload in [
            ("summary.json", summary),
            ("session.json", doc),
            ("previews.json", previews),
        ]:
            (OUT / name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
            print(f"wrote fixtures/{name}")
    finally:
        proc.terminate()
        proc.wait(timeout=10)


if __name__ == "__main__":
    main()
