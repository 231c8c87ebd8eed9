#!/usr/bin/env python3
"""Record API responses for the frontend contract tests.

Runs the canonical demo walkthrough against the in-process service and
dumps every response under frontend/tests/fixtures/. Deterministic: the
engine clock and session-id factory are pinned before recording.
"""

from __future__ import annotations

import json
import sys
import tempfile
from datetime import datetime, timedelta
from pathlib import Path

from fastapi.testclient import TestClient

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "frontend" / "tests" / "fixtures"

sys.path.insert(0, str(ROOT / "src"))

from guiscout.corpus import write_corpus
from guiscout.fixtures import DEMO_FEATURE, DEMO_QUERY, demo_corpus, write_demo_llm_script
from guiscout.service import ServiceSettings, create_app


class SteppingClock:
    def __init__(self):
        self.t = datetime.fromisoformat("2024-01-01T00:00:00+00:00")
        self.n = 0

    def __call__(self):
        ts = (self.t + timedelta(seconds=self.n)).isoformat()
        self.n += 1
        return ts


def dump(name: str, payload) -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    path = FIXTURES / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path.relative_to(ROOT)}")


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        write_corpus(root / "corpus", demo_corpus())
        write_demo_llm_script(root / "script.json")
        settings = ServiceSettings(
            corpus_dir=str(root / "corpus"),
            sessions_dir=str(root / "sessions"),
            llm_script_path=str(root / "script.json"),
        )
        app = create_app(settings)
        app.state.engine.clock = SteppingClock()
        app.state.engine.id_factory = lambda: "demo-session-0001"
        client = TestClient(app)

        dump("healthz", client.get("/healthz").json())

        created = client.post("/api/v1/sessions", json={"app_name": "GroceryDash"})
        dump("create_session", created.json())
        sid = created.json()["session"]["session_id"]
        base = f"/api/v1/sessions/{sid}/slots/0"

        query = client.post(f"{base}/query", json={"text": DEMO_QUERY}).json()
        dump("query", query)
        ranking = query["ranking"]

        feature = client.post(f"{base}/features", json={"text": DEMO_FEATURE}).json()
        dump("feature", feature)
        fid = feature["feature"]["feature_id"]

        decided = client.post(
            f"{base}/features/{fid}/decision",
            json={"decision": "select_aspect", "aspect": feature["aspect_ranking"][0]},
        ).json()
        dump("feature_decision", decided)
        before = [r["gui_id"] for r in ranking]
        after = [r["gui_id"] for r in decided["session"]["slots"][0]["current_ranking"]]
        if before == after:
            raise SystemExit(
                "fixture flaw: aspect confirmation did not reorder the workbench"
            )

        top_gui = after[0]
        selected = client.post(f"{base}/select-gui", json={"gui_id": top_gui}).json()
        dump("select_gui", selected)

        recs = client.post(f"{base}/recommendations").json()
        dump("recommendations", recs)
        rec_list = recs["recommendations"]
        assert len(rec_list) >= 3

        r0 = rec_list[0]
        dump(
            "rec_decision_aspect",
            client.post(
                f"{base}/recommendations/{r0['feature']['feature_id']}/decision",
                json={"decision": "select_aspect", "aspect": r0["aspect_ranking"][0]},
            ).json(),
        )
        r1 = rec_list[1]
        dump(
            "rec_decision_text",
            client.post(
                f"{base}/recommendations/{r1['feature']['feature_id']}/decision",
                json={"decision": "relevant_no_aspect"},
            ).json(),
        )
        r2 = rec_list[2]
        dump(
            "rec_decision_reject",
            client.post(
                f"{base}/recommendations/{r2['feature']['feature_id']}/decision",
                json={"decision": "not_relevant"},
            ).json(),
        )

        dump("complete", client.post(f"{base}/complete").json())
        dump("artifact", client.get(f"/api/v1/sessions/{sid}/artifact").json())
        dump("gui_document", client.get(f"/api/v1/guis/{top_gui}").json())

        conflict = client.post(f"{base}/query", json={"text": "again"})
        assert conflict.status_code == 409
        dump("error_state_conflict", conflict.json())

        print(f"session: {sid}, top gui: {top_gui}")


if __name__ == "__main__":
    main()
