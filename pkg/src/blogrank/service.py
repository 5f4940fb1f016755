"""HTTP service for the double-blind ranking evaluation.

Each query gets a randomly assigned ranking method that is persisted but
never disclosed in the response; clicks are appended durably to the log
before they are acknowledged. Metrics reveal methods only in aggregate.
"""

from __future__ import annotations

import json
import os
import random
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .evaluation import aggregate_si, load_click_log, t_test
from .ranker import RankVector
from .search import SearchIndex, search


@dataclass
class Session:
    query_id: str
    user: str
    method: str
    query: str
    results: list[str]  # permalinks by list position
    clicked: set[int] = field(default_factory=set)
    clicks: list[tuple[int, int, str]] = field(default_factory=list)


@dataclass
class ServiceState:
    index: SearchIndex
    ranks: dict[str, RankVector]  # method name -> vector
    log_path: Path
    seed: int | None = None
    limit: int = 1000
    sessions: dict[str, Session] = field(default_factory=dict)

    def __post_init__(self):
        self.log_path = Path(self.log_path)
        self.rng = random.Random(self.seed)
        self._lock = threading.Lock()
        if self.log_path.exists():
            self._replay()

    def _replay(self) -> None:
        """Restore sessions from the append-only log after a restart."""
        for line in self.log_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            if obj.get("type") == "session":
                self.sessions[obj["query_id"]] = Session(
                    query_id=obj["query_id"],
                    user=obj.get("user", ""),
                    method=obj["method"],
                    query=obj.get("query", ""),
                    results=obj.get("results", []),
                )
            elif obj.get("type") == "click":
                s = self.sessions.get(obj["query_id"])
                if s is not None and obj["position"] not in s.clicked:
                    s.clicked.add(obj["position"])
                    s.clicks.append(
                        (obj["order"], obj["position"], obj.get("permalink", ""))
                    )

    def _append(self, record: dict) -> None:
        """Durable append: the line is flushed and fsynced before returning."""
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def start_session(self, query: str, user: str):
        with self._lock:
            method = self.rng.choice(sorted(self.ranks))
            query_id = uuid.uuid4().hex
            results = search(self.index, query, self.ranks[method], self.limit)
            session = Session(
                query_id=query_id,
                user=user,
                method=method,
                query=query,
                results=[r.permalink for r in results],
            )
            self._append(
                {
                    "type": "session",
                    "query_id": query_id,
                    "user": user,
                    "method": method,
                    "ts": _now(),
                    "query": query,
                    "results": session.results,
                }
            )
            self.sessions[query_id] = session
            return session, results

    def record_click(self, query_id: str, position: int, permalink: str) -> int:
        with self._lock:
            session = self.sessions.get(query_id)
            if session is None:
                raise KeyError(query_id)
            if position < 1 or position > len(session.results):
                raise ValueError(f"position {position} out of range")
            if position in session.clicked:
                return 0  # duplicate: acknowledged, not logged
            order = len(session.clicks) + 1
            self._append(
                {
                    "type": "click",
                    "query_id": query_id,
                    "order": order,
                    "position": position,
                    "permalink": permalink,
                    "ts": _now(),
                }
            )
            session.clicked.add(position)
            session.clicks.append((order, position, permalink))
            return order


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class ClickBody(BaseModel):
    query_id: str
    position: int
    permalink: str = ""


def create_app(state: ServiceState, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="blogrank evaluation service")
    app.state.service = state

    @app.get("/api/search")
    def api_search(q: str = "", user: str = ""):
        if not q.strip():
            raise HTTPException(status_code=400, detail="empty query")
        if state.index is None:
            raise HTTPException(status_code=503, detail="index unavailable")
        try:
            session, results = state.start_session(q, user)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {
            "query_id": session.query_id,
            "results": [
                {
                    "position": r.position,
                    "permalink": r.permalink,
                    "weblog": r.weblog_id,
                    "snippet": r.snippet,
                    "ts": r.published_at,
                }
                for r in results
            ],
        }

    @app.post("/api/click")
    def api_click(body: ClickBody):
        try:
            order = state.record_click(body.query_id, body.position, body.permalink)
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown query_id") from None
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return {"ok": True, "duplicate": order == 0}

    @app.get("/api/metrics")
    def api_metrics():
        sessions = (
            load_click_log(state.log_path) if state.log_path.exists() else []
        )
        report = aggregate_si(sessions)
        methods = {
            m: {"count": s.count, "mean_si": s.mean_si, "std_si": s.std_si}
            for m, s in report.methods.items()
        }
        pairwise = []
        names = sorted(report.methods)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                entry: dict = {"a": a, "b": b}
                try:
                    res = t_test(
                        report.methods[a].values, report.methods[b].values
                    )
                    entry.update(t=res.t, df=res.df, p=res.p)
                except ValueError as exc:
                    entry["error"] = str(exc)
                pairwise.append(entry)
        return {
            "methods": methods,
            "pairwise": pairwise,
            "excluded": report.excluded,
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app
