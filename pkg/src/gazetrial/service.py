"""HTTP middleware: run sessions, poll performance, stream the mirror.

The engine never touches files or sockets itself. Each started session runs
on its own worker thread that drives the closed loop (synthetic participant
against the engine); external commands are enqueued into that loop's input
stream. Read endpoints serve immutable snapshots, the mirror is a
server-pushed event stream over a persistent HTTP connection, and finished
sessions are persisted as canonical JSON logs.
"""

from __future__ import annotations

import json
import os
import queue
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, StreamingResponse

from .behavior import BehaviorProfile
from .config import ParticipantMeta, SessionConfig
from .engine import Session, SessionLog, new_session
from .errors import ConfigError
from .events import FeedbackIssued, PhaseChanged, TrialPhase, TrialStarted
from .geometry import Circle, Scene
from .presets import preset
from .runner import CMD_STOP, run_session
from .schemas import validate_payload
from .storage import store_log, trial_to_jsonable

LOG_DIR_ENV = "GAZETRIAL_LOG_DIR"

PHASE_CREATED = "created"
PHASE_TERMINATED = "terminated"


@dataclass
class ServiceSettings:
    log_dir: Path = Path("session_logs")
    mirror_rate_hz: float = 10.0
    poll_interval_s: float = 1.0  # suggested client polling cadence

    @classmethod
    def from_file(cls, path: str | Path | None) -> "ServiceSettings":
        settings = cls()
        if path is not None:
            raw = json.loads(Path(path).read_text("utf-8"))
            if "log_dir" in raw:
                settings.log_dir = Path(raw["log_dir"])
            if "mirror_rate_hz" in raw:
                settings.mirror_rate_hz = float(raw["mirror_rate_hz"])
            if "poll_interval_s" in raw:
                settings.poll_interval_s = float(raw["poll_interval_s"])
        env_dir = os.environ.get(LOG_DIR_ENV)
        if env_dir:
            settings.log_dir = Path(env_dir)
        return settings


def _scene_jsonable(scene: Scene) -> list[dict]:
    rois = []
    for roi in scene.rois:
        s = roi.shape
        if isinstance(s, Circle):
            shape = {"kind": "circle", "cx": s.cx, "cy": s.cy, "radius": s.radius}
        else:
            shape = {"kind": "rect", "x_min": s.x_min, "y_min": s.y_min,
                     "x_max": s.x_max, "y_max": s.y_max}
        rois.append({"id": roi.roi_id, "shape": shape})
    return rois


class SessionHandle:
    """One managed session: engine state, worker thread, and snapshots."""

    def __init__(self, session: Session, profile: BehaviorProfile, behavior_seed: int,
                 mirror_rate_hz: float):
        self.session = session
        self.profile = profile
        self.behavior_seed = behavior_seed
        self.mirror_period_ms = 1000.0 / mirror_rate_hz
        self.lock = threading.Lock()
        self.state = PHASE_CREATED  # created | running | terminated
        self.commands: queue.SimpleQueue = queue.SimpleQueue()
        self.subscribers: list[queue.Queue] = []
        self.log: SessionLog | None = None
        self.log_path: Path | None = None
        self.thread: threading.Thread | None = None
        self._cue_side: str | None = None
        self._last_feedback: str | None = None
        self._next_frame_ms = 0.0
        self._rois = _scene_jsonable(session.scene)
        self.payload = self._build_payload()

    # -- snapshots ----------------------------------------------------------

    def phase_label(self) -> str:
        if self.state == PHASE_TERMINATED:
            return PHASE_TERMINATED
        phase = self.session.phase
        return PHASE_CREATED if phase is None else phase.value

    def _build_payload(self) -> dict:
        s = self.session
        return {
            "schema_version": "1",
            "session_id": s.session_id,
            "participant": s.participant.to_dict(),
            "phase": self.phase_label(),
            "trials": [trial_to_jsonable(r) for r in s.records if r.done],
            "last_update_ms": s.last_update_ms,
        }

    def refresh_payload(self) -> None:
        snapshot = self._build_payload()
        with self.lock:
            self.payload = snapshot

    def build_frame(self) -> dict:
        s = self.session
        gaze = None
        if s.last_gaze is not None and s.last_gaze.valid:
            gaze = {"x": s.last_gaze.x, "y": s.last_gaze.y}
        return {
            "schema_version": "1",
            "t_ms": s.last_update_ms,
            "phase": self.phase_label(),
            "rois": self._rois,
            "gaze": gaze,
            "cue_side": self._cue_side,
            "last_feedback": self._last_feedback,
        }

    def publish_frame(self) -> None:
        frame = self.build_frame()
        with self.lock:
            for q in self.subscribers:
                q.put(frame)

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self.lock:
            self.subscribers.append(q)
            q.put(self.build_frame())  # greet the subscriber with current state
            if self.state == PHASE_TERMINATED:
                q.put(None)
        return q

    def _close_streams(self) -> None:
        with self.lock:
            for q in self.subscribers:
                q.put(None)

    # -- worker -------------------------------------------------------------

    def _on_events(self, session: Session, events) -> None:
        for ev in events:
            if isinstance(ev, TrialStarted):
                self._cue_side = None
                self._last_feedback = None
            elif isinstance(ev, PhaseChanged):
                if ev.phase is TrialPhase.CUE_HEAD_TURN:
                    self._cue_side = session.records[-1].cued_side
                elif ev.phase in (TrialPhase.AWAIT_RESPONSE, TrialPhase.DONE):
                    self._cue_side = None
            elif isinstance(ev, FeedbackIssued):
                self._last_feedback = "positive" if ev.positive else "negative"
        # The terminated label is published by run() only after the log is
        # persisted, so "terminated" always implies a readable log file.
        self.refresh_payload()
        self.publish_frame()

    def _on_sample(self, session: Session) -> None:
        if session.last_update_ms >= self._next_frame_ms:
            self._next_frame_ms = session.last_update_ms + self.mirror_period_ms
            self.refresh_payload()
            self.publish_frame()

    def _drain_commands(self):
        cmds = []
        while True:
            try:
                cmds.append(self.commands.get_nowait())
            except queue.Empty:
                return cmds

    def run(self, log_dir: Path) -> None:
        try:
            log = run_session(
                self.session.config, self.session.participant, self.profile,
                session_id=self.session.session_id, setup=self.session.setup,
                scene=self.session.scene, behavior_seed=self.behavior_seed,
                on_events=self._on_events, on_sample=self._on_sample,
                poll_commands=self._drain_commands,
                session=self.session,
            )
            self._store(log, log_dir)
        finally:
            self.state = PHASE_TERMINATED
            self.refresh_payload()
            self.publish_frame()
            self._close_streams()

    def _store(self, log: SessionLog, log_dir: Path) -> None:
        log_dir.mkdir(parents=True, exist_ok=True)
        path = log_dir / f"{log.session_id}.json"
        store_log(log, path)
        with self.lock:
            self.log = log
            self.log_path = path


def _http_config_error(exc: ConfigError) -> HTTPException:
    return HTTPException(status_code=400, detail={"field": exc.field, "message": str(exc)})


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings.from_file(None)
    app = FastAPI(title="gazetrial session service")
    sessions: dict[str, SessionHandle] = {}
    registry_lock = threading.Lock()

    def _get(session_id: str) -> SessionHandle:
        handle = sessions.get(session_id)
        if handle is None:
            raise HTTPException(status_code=404, detail={"message": f"unknown session {session_id!r}"})
        return handle

    async def _parse_body(request: Request) -> dict:
        raw = await request.body()
        if not raw:
            return {}
        try:
            body = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise HTTPException(status_code=400, detail={"field": "<body>", "message": f"invalid JSON: {exc}"})
        if not isinstance(body, dict):
            raise HTTPException(status_code=400, detail={"field": "<body>", "message": "expected a JSON object"})
        return body

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/session", status_code=201)
    async def create_session(request: Request):
        body = await _parse_body(request)
        config_dict = body.get("config", {})
        try:
            validate_payload(config_dict, "session_config")
        except Exception as exc:  # jsonschema.ValidationError
            path = "/".join(str(p) for p in getattr(exc, "path", [])) or "config"
            raise HTTPException(status_code=400, detail={"field": path, "message": getattr(exc, "message", str(exc))})
        try:
            config = SessionConfig.from_dict(config_dict)
            participant = ParticipantMeta.from_dict(body.get("participant", {
                "participant_id": "anon", "group": "NT", "age_years": 10.0,
                "cars_score": 0.0, "synthetic": True,
            }))
            profile_spec = body.get("profile", "NT_VR")
            profile = preset(profile_spec) if isinstance(profile_spec, str) \
                else BehaviorProfile.from_dict(profile_spec)
        except ConfigError as exc:
            raise _http_config_error(exc)
        except TypeError as exc:
            raise HTTPException(status_code=400, detail={"field": "<body>", "message": str(exc)})
        session_id = str(body.get("session_id") or uuid.uuid4().hex)
        setup = str(body.get("setup", "VR"))
        behavior_seed = int(body.get("behavior_seed", 0))
        handle = SessionHandle(
            new_session(config, participant, session_id=session_id, setup=setup),
            profile, behavior_seed, settings.mirror_rate_hz,
        )
        with registry_lock:
            if session_id in sessions:
                raise HTTPException(status_code=409, detail={"message": f"session {session_id!r} already exists"})
            sessions[session_id] = handle
        return {"session_id": session_id, "phase": handle.phase_label()}

    @app.post("/api/session/{session_id}/start")
    def start_session(session_id: str):
        handle = _get(session_id)
        with handle.lock:
            if handle.state != PHASE_CREATED:
                raise HTTPException(status_code=409, detail={"message": f"session is {handle.state}"})
            handle.state = "running"
        handle.thread = threading.Thread(target=handle.run, args=(settings.log_dir,),
                                         name=f"session-{session_id}", daemon=True)
        handle.thread.start()
        return {"session_id": session_id, "phase": "running"}

    @app.post("/api/session/{session_id}/stop")
    def stop_session(session_id: str):
        handle = _get(session_id)
        if handle.state == PHASE_TERMINATED:
            raise HTTPException(status_code=409, detail={"message": "session already terminated"})
        if handle.state == PHASE_CREATED:
            # Never started: close it out directly.
            handle.session.stop(0.0)
            handle._store(handle.session.finalize(), settings.log_dir)
            handle.state = PHASE_TERMINATED
            handle.refresh_payload()
            handle.publish_frame()
            handle._close_streams()
        else:
            handle.commands.put(CMD_STOP)
        return {"session_id": session_id, "stopping": True}

    @app.get("/api/session/{session_id}/performance")
    def performance(session_id: str):
        handle = _get(session_id)
        with handle.lock:
            return JSONResponse(handle.payload)

    @app.get("/api/session/{session_id}/stream")
    def stream(session_id: str):
        handle = _get(session_id)
        subscriber = handle.subscribe()

        def gen():
            while True:
                frame = subscriber.get()
                if frame is None:
                    return
                yield f"data: {json.dumps(frame)}\n\n"

        return StreamingResponse(gen(), media_type="text/event-stream")

    @app.post("/api/session/{session_id}/feedback")
    async def feedback(session_id: str, request: Request):
        handle = _get(session_id)
        body = await _parse_body(request)
        if handle.state != PHASE_TERMINATED or handle.log is None:
            raise HTTPException(status_code=409, detail={"message": "feedback is accepted after the session ends"})
        note = body.get("note", "")
        if not isinstance(note, str):
            raise HTTPException(status_code=400, detail={"field": "note", "message": "must be a string"})
        with handle.lock:
            handle.log.feedback_note = note
            store_log(handle.log, handle.log_path)
        return {"session_id": session_id, "stored": True}

    @app.get("/api/session/{session_id}/log")
    def get_log(session_id: str):
        handle = _get(session_id)
        if handle.log_path is None:
            raise HTTPException(status_code=409, detail={"message": "no log yet; session has not terminated"})
        return JSONResponse(json.loads(handle.log_path.read_text("utf-8")))

    app.state.sessions = sessions
    app.state.settings = settings
    return app


def serve(bind: str = "127.0.0.1:8000", config_file: str | None = None) -> None:
    """Blocking entry point used by the CLI."""
    import uvicorn

    host, _, port = bind.partition(":")
    settings = ServiceSettings.from_file(config_file)
    uvicorn.run(create_app(settings), host=host or "127.0.0.1", port=int(port or 8000),
                log_level="warning")
