"""HTTP + WebSocket interface: session lifecycle, utterances, state, events.

Loopback desk tool: no auth, sessions live in process memory. Every session
request is serialized through a per-session lock so event ticks stay strictly
ordered; the event stream replays the append-only log from any tick, so a
reconnecting client resumes without gaps or duplicates.
"""

from __future__ import annotations

import asyncio
import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import defaults, logic, perception
from .engine import ScriptError, Session, SessionClosed, SessionSpec
from .memory import ValidationError


@dataclass
class SessionHub:
    session: Session
    descriptor: dict
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionRegistry:
    def __init__(self):
        self._hubs: dict[str, SessionHub] = {}
        self._lock = threading.Lock()

    def create(self, doc: dict, base_dir: Optional[Path] = None) -> SessionHub:
        spec = SessionSpec.load(doc, base_dir)
        session_id = secrets.token_urlsafe(16)
        session = Session(spec, session_id=session_id)
        descriptor = {
            "id": session_id,
            "agents": {"self": spec.self_agent, "interlocutor": spec.interlocutor},
            "scenario": doc.get("name"),
            "created": time.time(),
        }
        hub = SessionHub(session=session, descriptor=descriptor)
        with self._lock:
            self._hubs[session_id] = hub
        return hub

    def get(self, session_id: str) -> SessionHub:
        hub = self._hubs.get(session_id)
        if hub is None or hub.session.closed:
            raise KeyError(session_id)
        return hub

    def close(self, session_id: str) -> None:
        hub = self._hubs.get(session_id)
        if hub is None or hub.session.closed:
            raise KeyError(session_id)
        hub.session.close()


class CreateSessionRequest(BaseModel):
    scenario: Optional[str] = None
    script: Optional[dict] = None
    config: Optional[dict] = None


class UtteranceRequest(BaseModel):
    text: str


class StimulusRequest(BaseModel):
    content: str
    responsible: Optional[str] = None


def _resolve_session_doc(request: CreateSessionRequest) -> tuple[dict, Optional[Path]]:
    if request.script is not None:
        return dict(request.script), None
    if request.scenario:
        path = Path(request.scenario)
        if path.exists():
            return json.loads(path.read_text(encoding="utf-8")), path.parent
        try:
            return defaults.scenario_doc(request.scenario), None
        except FileNotFoundError:
            raise ScriptError(f"unknown scenario {request.scenario!r}") from None
    return defaults.scenario_doc("nao_unplugged"), None


def create_app(registry: Optional[SessionRegistry] = None, ui_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="caio", version="0.1.0")
    app.state.registry = registry or SessionRegistry()
    reg: SessionRegistry = app.state.registry

    def hub_or_404(session_id: str) -> SessionHub:
        try:
            return reg.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="session not found") from None

    @app.post("/sessions", status_code=201)
    def create_session(request: CreateSessionRequest):
        try:
            doc, base_dir = _resolve_session_doc(request)
            if request.config:
                doc = dict(doc)
                merged = dict(doc.get("config", {}))
                merged.update(request.config)
                doc["config"] = merged
            hub = reg.create(doc, base_dir)
        except (ScriptError, ValidationError, logic.FormulaSyntaxError) as exc:
            raise HTTPException(status_code=400, detail=f"bad config: {exc}") from exc
        return hub.descriptor

    @app.post("/sessions/{session_id}/utterances")
    def post_utterance(session_id: str, request: UtteranceRequest):
        hub = hub_or_404(session_id)
        with hub.lock:
            try:
                events = hub.session.handle_utterance(request.text)
            except SessionClosed:
                raise HTTPException(status_code=404, detail="session closed") from None
        return {"accepted": True, "tick": events[-1].tick if events else hub.session.clock.current}

    @app.post("/sessions/{session_id}/stimuli")
    def post_stimulus(session_id: str, request: StimulusRequest):
        hub = hub_or_404(session_id)
        try:
            content = logic.parse_formula(request.content)
        except logic.FormulaSyntaxError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        stimulus = perception.Stimulus(
            content=content,
            agent_responsible=request.responsible,
            perceiver=hub.session.self_agent,
        )
        with hub.lock:
            try:
                events = hub.session.handle_stimulus(stimulus)
            except SessionClosed:
                raise HTTPException(status_code=404, detail="session closed") from None
        return {"accepted": True, "tick": events[-1].tick if events else hub.session.clock.current}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        hub = hub_or_404(session_id)
        with hub.lock:
            return hub.session.state_view()

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        try:
            reg.close(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail="session not found") from None
        return {"closed": True}

    @app.get("/sessions/{session_id}/events")
    def poll_events(session_id: str, after: int = 0):
        hub = hub_or_404(session_id)
        events = [e for e in hub.session.events if e.tick > after]
        return {"events": [{"tick": e.tick, "kind": e.kind, "payload": e.payload} for e in events]}

    @app.websocket("/sessions/{session_id}/events")
    async def stream_events(websocket: WebSocket, session_id: str):
        await websocket.accept()
        try:
            hub = reg.get(session_id)
        except KeyError:
            await websocket.close(code=4404)
            return
        try:
            after = int(websocket.query_params.get("after", 0))
        except ValueError:
            after = 0
        cursor = 0
        session = hub.session
        try:
            while True:
                events = session.events
                while cursor < len(events):
                    event = events[cursor]
                    cursor += 1
                    if event.tick > after:
                        await websocket.send_text(event.to_json())
                if session.closed:
                    await websocket.close()
                    return
                await asyncio.sleep(0.025)
        except WebSocketDisconnect:
            return

    index_html = _find_ui(ui_dir)
    if index_html is not None:
        app.mount("/ui", StaticFiles(directory=str(index_html.parent), html=True), name="ui")

        @app.get("/", include_in_schema=False)
        def root_ui():
            return FileResponse(str(index_html))

    else:

        @app.get("/", include_in_schema=False)
        def root_info():
            return JSONResponse(
                {
                    "service": "caio",
                    "endpoints": [
                        "POST /sessions",
                        "POST /sessions/{id}/utterances",
                        "POST /sessions/{id}/stimuli",
                        "GET /sessions/{id}/state",
                        "GET|WS /sessions/{id}/events",
                        "DELETE /sessions/{id}",
                    ],
                    "console": "not built (see frontend/README)",
                }
            )

    return app


def _find_ui(ui_dir: Optional[Path]) -> Optional[Path]:
    candidates = []
    if ui_dir:
        candidates.append(Path(ui_dir))
    here = Path(__file__).resolve()
    for ancestor in here.parents:
        candidates.append(ancestor / "frontend" / "dist")
    for candidate in candidates:
        index = candidate / "index.html"
        if index.exists():
            return index
    return None
