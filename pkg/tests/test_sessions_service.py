import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from graphsr.graph import build_from_edges, laplacian
from graphsr.graphio import write_graph, write_signal, write_vertex_meta
from graphsr.recovery import LassoConfig
from graphsr.selector import GroundTruthOracle, run_sr
from graphsr.service import create_app
from graphsr.sessions import MeasurementSchema, SchemaMismatchError, SessionStore
from graphsr.spectral import KernelSpec, eigendecompose

DEMO_EDGES = [
    (0, 1, 1.0),
    (1, 2, 0.8),
    (2, 3, 1.2),
    (3, 4, 0.6),
    (0, 2, 0.5),
    (1, 4, 0.9),
]


@pytest.fixture
def demo(tmp_path):
    """5-vertex demo graph + 2-feature truth, staged inside a data dir."""
    g = build_from_edges(5, DEMO_EDGES)
    rng = np.random.default_rng(101)
    truth = rng.normal(size=(5, 2))
    data_dir = tmp_path / "data"
    data_dir.mkdir()
    write_graph(g, data_dir / "demo.grf")
    meta = tuple(
        {"label": f"item-{v}", "image_url": f"http://img/{v}.png"} for v in range(5)
    )
    write_vertex_meta(meta, data_dir / "demo.meta.json")
    write_signal(truth, data_dir / "truth.csv")
    return {"graph": g, "truth": truth, "data_dir": data_dir}


def make_client(demo):
    return TestClient(create_app(demo["data_dir"]))


def create_session(client, m=3, k=3, p=2, kind="real", **extra):
    body = {
        "graph": "demo.grf",
        "meta": "demo.meta.json",
        "k": k,
        "xi": 0.01,
        "alpha": 1.0,
        "m": m,
        "schema": {"p": p, "kind": kind},
    }
    body.update(extra)
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 200, resp.text
    return resp.json()


def drive_session(client, sid, truth, until=None):
    """Observe ground-truth values until the session completes (or `until`
    observations were accepted)."""
    done = 0
    while True:
        nxt = client.get(f"/sessions/{sid}/next").json()
        if nxt["status"] == "complete":
            return done
        v = nxt["vertex"]
        resp = client.post(
            f"/sessions/{sid}/observe",
            json={"vertex": v, "values": [float(x) for x in truth[v]]},
        )
        assert resp.status_code == 200, resp.text
        done += 1
        if until is not None and done >= until:
            return done


class TestSessionLifecycle:
    def test_create_returns_first_proposal(self, demo):
        client = make_client(demo)
        created = create_session(client)
        assert isinstance(created["id"], str)
        assert 0 <= created["vertex"] < 5
        assert created["status"] == "awaiting_observation"
        assert created["delta"] > 0

    def test_next_is_idempotent(self, demo):
        client = make_client(demo)
        created = create_session(client)
        sid = created["id"]
        first = client.get(f"/sessions/{sid}/next").json()
        second = client.get(f"/sessions/{sid}/next").json()
        assert first == second
        assert first["vertex"] == created["vertex"]
        assert first["vertex_meta"] == {
            "label": f"item-{first['vertex']}",
            "image_url": f"http://img/{first['vertex']}.png",
        }

    def test_estimate_before_observation_is_zero(self, demo):
        client = make_client(demo)
        sid = create_session(client)["id"]
        est = client.get(f"/sessions/{sid}/estimate").json()
        assert est["values"] == [[0.0, 0.0]] * 5
        assert est["observed"] == [False] * 5

    def test_full_session_matches_batch_run(self, demo):
        client = make_client(demo)
        sid = create_session(client, m=3, k=3)["id"]
        drive_session(client, sid, demo["truth"])
        est = client.get(f"/sessions/{sid}/estimate").json()
        assert est["status"] == "complete"
        spec = eigendecompose(laplacian(demo["graph"]), 3)
        batch = run_sr(
            spec,
            KernelSpec("heat"),
            GroundTruthOracle(demo["truth"]),
            m=3,
            cfg=LassoConfig(xi=0.01),
            alpha=1.0,
        )
        assert np.array_equal(np.asarray(est["values"]), batch.z_star)
        state = client.get(f"/sessions/{sid}/state").json()
        assert state["policy"] == batch.policy
        assert state["observed_count"] == 3
        assert [r["vertex"] for r in state["audit"]] == batch.policy
        for rec, ref in zip(state["audit"], batch.audit):
            assert rec["delta"] == ref.delta
            assert rec["s"] == ref.s
            assert rec["eta"] == ref.eta
            assert rec["residual"] == ref.residual

    def test_observed_flags_track_policy(self, demo):
        client = make_client(demo)
        sid = create_session(client, m=2)["id"]
        drive_session(client, sid, demo["truth"], until=1)
        est = client.get(f"/sessions/{sid}/estimate").json()
        state = client.get(f"/sessions/{sid}/state").json()
        observed = [i for i, flag in enumerate(est["observed"]) if flag]
        assert observed == sorted(state["policy"][:1])

    def test_session_file_persisted_per_transition(self, demo):
        client = make_client(demo)
        sid = create_session(client, m=2)["id"]
        path = demo["data_dir"] / f"{sid}.json"
        assert path.exists()
        snapshot1 = json.loads(path.read_text())
        assert snapshot1["status"] == "awaiting_observation"
        drive_session(client, sid, demo["truth"], until=1)
        snapshot2 = json.loads(path.read_text())
        assert snapshot2["state"]["iteration"] == 1


class TestProtocolErrors:
    def test_unknown_session_404(self, demo):
        client = make_client(demo)
        assert client.get("/sessions/nope/next").status_code == 404
        assert client.get("/sessions/nope/estimate").status_code == 404
        assert client.get("/sessions/nope/state").status_code == 404
        resp = client.post(
            "/sessions/nope/observe", json={"vertex": 0, "values": [0.0, 0.0]}
        )
        assert resp.status_code == 404

    def test_wrong_vertex_409(self, demo):
        client = make_client(demo)
        created = create_session(client)
        sid, pending = created["id"], created["vertex"]
        wrong = (pending + 1) % 5
        resp = client.post(
            f"/sessions/{sid}/observe", json={"vertex": wrong, "values": [0.0, 0.0]}
        )
        assert resp.status_code == 409

    def test_double_observe_409(self, demo):
        client = make_client(demo)
        created = create_session(client, m=2)
        sid, v = created["id"], created["vertex"]
        values = [float(x) for x in demo["truth"][v]]
        assert (
            client.post(
                f"/sessions/{sid}/observe", json={"vertex": v, "values": values}
            ).status_code
            == 200
        )
        resp = client.post(
            f"/sessions/{sid}/observe", json={"vertex": v, "values": values}
        )
        assert resp.status_code == 409

    def test_observe_after_complete_409(self, demo):
        client = make_client(demo)
        sid = create_session(client, m=1)["id"]
        drive_session(client, sid, demo["truth"])
        resp = client.post(
            f"/sessions/{sid}/observe", json={"vertex": 0, "values": [0.0, 0.0]}
        )
        assert resp.status_code == 409

    def test_wrong_arity_422(self, demo):
        client = make_client(demo)
        created = create_session(client)
        resp = client.post(
            f"/sessions/{created['id']}/observe",
            json={"vertex": created["vertex"], "values": [0.0]},
        )
        assert resp.status_code == 422

    def test_wrong_kind_422(self, demo):
        client = make_client(demo)
        created = create_session(client, kind="binary")
        resp = client.post(
            f"/sessions/{created['id']}/observe",
            json={"vertex": created["vertex"], "values": [0.5, 1.0]},
        )
        assert resp.status_code == 422

    def test_binary_values_accepted(self, demo):
        client = make_client(demo)
        created = create_session(client, kind="binary")
        resp = client.post(
            f"/sessions/{created['id']}/observe",
            json={"vertex": created["vertex"], "values": [0.0, 1.0]},
        )
        assert resp.status_code == 200

    def test_missing_graph_422(self, demo):
        client = make_client(demo)
        resp = client.post(
            "/sessions",
            json={
                "graph": "missing.grf",
                "k": 2,
                "m": 1,
                "schema": {"p": 2, "kind": "real"},
            },
        )
        assert resp.status_code == 422

    def test_budget_above_n_422(self, demo):
        client = make_client(demo)
        resp = client.post(
            "/sessions",
            json={
                "graph": "demo.grf",
                "k": 2,
                "m": 9,
                "schema": {"p": 2, "kind": "real"},
            },
        )
        assert resp.status_code == 422


class TestCrashResume:
    def test_restart_mid_session_matches_uninterrupted(self, demo):
        client_a = make_client(demo)
        sid = create_session(client_a, m=4, k=3)["id"]
        drive_session(client_a, sid, demo["truth"], until=2)
        before = client_a.get(f"/sessions/{sid}/next").json()

        # fresh app over the same data dir simulates a process restart
        client_b = make_client(demo)
        after = client_b.get(f"/sessions/{sid}/next").json()
        assert after == before
        drive_session(client_b, sid, demo["truth"])
        est = client_b.get(f"/sessions/{sid}/estimate").json()

        spec = eigendecompose(laplacian(demo["graph"]), 3)
        batch = run_sr(
            spec,
            KernelSpec("heat"),
            GroundTruthOracle(demo["truth"]),
            m=4,
            cfg=LassoConfig(xi=0.01),
        )
        assert np.array_equal(np.asarray(est["values"]), batch.z_star)
        assert client_b.get(f"/sessions/{sid}/state").json()["policy"] == batch.policy

    def test_spectrum_cache_reused(self, demo):
        store = SessionStore(demo["data_dir"])
        schema = MeasurementSchema(p=2)
        store.create("demo.grf", k=3, m=2, schema=schema)
        cache_files = list((demo["data_dir"] / "spectra").glob("*.npz"))
        assert len(cache_files) == 1
        store.create("demo.grf", k=3, m=2, schema=schema)
        assert list((demo["data_dir"] / "spectra").glob("*.npz")) == cache_files


class TestMeasurementSchema:
    def test_validates_arity_kind_and_finiteness(self):
        schema = MeasurementSchema(p=2, kind="binary")
        with pytest.raises(SchemaMismatchError):
            schema.validate_values([1.0])
        with pytest.raises(SchemaMismatchError):
            schema.validate_values([0.5, 1.0])
        with pytest.raises(SchemaMismatchError):
            MeasurementSchema(p=2, kind="real").validate_values([np.inf, 0.0])
        assert np.array_equal(schema.validate_values([0, 1]), [0.0, 1.0])

    def test_feature_names_length(self):
        with pytest.raises(SchemaMismatchError):
            MeasurementSchema(p=2, feature_names=["a"])

    def test_unknown_kind(self):
        with pytest.raises(SchemaMismatchError):
            MeasurementSchema(p=1, kind="complex")


def test_ui_mount_when_dir_exists(tmp_path, demo):
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<html><body>console</body></html>")
    client = TestClient(create_app(demo["data_dir"], ui_dir=ui))
    resp = client.get("/ui/")
    assert resp.status_code == 200
    assert "console" in resp.text
