"""HTTP service exposing sessions, turns, transcripts, and the calendar.

Requests targeting one session are serialized by a per-session lock, so
concurrent posts interleave in some arrival order but never corrupt the
session state.  Trace strings over the wire are exactly the CLI trace
lines.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .dialogue import Session
from .semantics import render_slots, slots_to_json


@dataclass
class ServiceConfig:
    grammar_path: str
    store_path: str | None = None
    today: str | None = None
    trace: bool = False


@dataclass
class SessionHandle:
    id: str
    session: Session
    lock: threading.Lock = field(default_factory=threading.Lock)
    turns: list = field(default_factory=list)


class UtteranceBody(BaseModel):
    utterance: str


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="caltalk", version="0.1.0")
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, SessionHandle] = {}
    counter = itertools.count(1)
    registry_lock = threading.Lock()

    def handle_of(session_id: str) -> SessionHandle:
        handle = sessions.get(session_id)
        if handle is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return handle

    @app.post("/sessions")
    def create_session():
        with registry_lock:
            session_id = f"s{next(counter):04d}"
            store_path = config.store_path
            if store_path:
                store_path = f"{store_path}.{session_id}"
            sessions[session_id] = SessionHandle(
                id=session_id,
                session=Session(
                    config.grammar_path,
                    store=store_path,
                    today=config.today,
                    trace=config.trace,
                ),
            )
        return {"session_id": session_id}

    @app.post("/sessions/{session_id}/turns")
    def post_turn(session_id: str, body: UtteranceBody):
        handle = handle_of(session_id)
        if not body.utterance.strip():
            raise HTTPException(status_code=400, detail="empty utterance")
        with handle.lock:
            result = handle.session.run_turn(body.utterance)
            turn = {
                "utterance": body.utterance,
                "reply": {
                    "kind": result.reply.kind,
                    "text": result.reply.surface_text,
                },
                "slots": slots_to_json(result.slots),
                "slots_rendered": render_slots(result.slots),
            }
            if result.trace is not None:
                turn["trace"] = result.trace
            if result.event is not None:
                turn["event"] = result.event.to_json()
            handle.turns.append(turn)
        return turn

    @app.get("/sessions/{session_id}/transcript")
    def get_transcript(session_id: str):
        handle = handle_of(session_id)
        with handle.lock:
            return {
                "lines": list(handle.session.transcript),
                "text": handle.session.transcript_text(),
                "turns": list(handle.turns),
            }

    @app.get("/sessions/{session_id}/calendar")
    def get_calendar(session_id: str):
        handle = handle_of(session_id)
        with handle.lock:
            return {"events": [e.to_json() for e in handle.session.store.events]}

    @app.get("/sessions/{session_id}/calendar.ics")
    def get_calendar_ical(session_id: str):
        handle = handle_of(session_id)
        with handle.lock:
            return {"ical": handle.session.store.to_ical()}

    return app
