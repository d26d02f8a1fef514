"""HTTP session API (stdlib only), plus static hosting for the web client.

    POST /sessions                {"spec": "<structure spec text>"}
    GET  /sessions/{id}/state
    POST /sessions/{id}/query     {"symbol": "R1", "point": [0]}
    POST /sessions/{id}/eval      {"formula": "R1(0)"}
    GET  /sessions/{id}/log

Responses are JSON; errors are {"code", "message", "position"?} with 4xx
status.  Sessions are in-memory; mutations within one session serialize on
the session lock, and independent sessions are served concurrently by the
threading server.
"""

import json
import re
import threading
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from .parser import ParseError
from .semantics import EvaluationError
from .session import Session
from .specfile import SpecFileError, load_structure
from .states import StructureError


class SessionStore:
    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, spec_text: str) -> Session:
        structure = load_structure(spec_text)
        session = Session(structure, spec_text=spec_text)
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Optional[Session]:
        with self._lock:
            return self._sessions.get(session_id)


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.position = position

    def body(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.position is not None:
            out["position"] = self.position
        return out


_SESSION_ROUTE = re.compile(r"^/sessions/([A-Za-z0-9_-]+)/(state|query|eval|log)$")


def _dispatch(store: SessionStore, method: str, path: str, body: dict) -> tuple[int, dict]:
    if method == "POST" and path == "/sessions":
        spec = body.get("spec")
        if not isinstance(spec, str) or not spec.strip():
            raise ApiError(400, "bad_request", "body must carry a structure spec in 'spec'")
        try:
            session = store.create(spec)
        except (SpecFileError, StructureError) as exc:
            raise ApiError(400, "bad_spec", str(exc))
        return 201, session.snapshot()

    m = _SESSION_ROUTE.match(path)
    if m is None:
        raise ApiError(404, "not_found", f"no route {method} {path}")
    session = store.get(m.group(1))
    if session is None:
        raise ApiError(404, "no_such_session", f"unknown session {m.group(1)}")
    action = m.group(2)

    if method == "GET" and action == "state":
        return 200, session.snapshot()
    if method == "GET" and action == "log":
        return 200, {
            "id": session.id,
            "events": [
                {"seq": e.seq, "symbol": e.symbol, "point": list(e.point), "value": e.value}
                for e in session.events
            ],
        }
    if method == "POST" and action == "query":
        symbol = body.get("symbol")
        point = body.get("point")
        if not isinstance(symbol, str) or not isinstance(point, list):
            raise ApiError(400, "bad_request", "query body needs 'symbol' (string) and 'point' (list)")
        try:
            value, seq = session.query(symbol, tuple(int(c) for c in point))
        except (StructureError, ValueError) as exc:
            raise ApiError(400, "bad_query", str(exc))
        snapshot = session.snapshot()
        snapshot.update({"value": value, "event": seq})
        return 200, snapshot
    if method == "POST" and action == "eval":
        formula = body.get("formula")
        if not isinstance(formula, str):
            raise ApiError(400, "bad_request", "eval body needs 'formula' (string)")
        try:
            entry = session.eval(formula)
        except ParseError as exc:
            raise ApiError(400, "parse_error", exc.message, position=exc.position)
        except EvaluationError as exc:
            raise ApiError(400, "bad_formula", str(exc))
        snapshot = session.snapshot()
        snapshot.update(
            {
                "formula": entry.text,
                "satisfied": entry.verdict.satisfied,
                "flipped_at": entry.flipped_at,
            }
        )
        return 200, snapshot
    raise ApiError(405, "method_not_allowed", f"cannot {method} {path}")


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".json": "application/json",
}


def make_handler(store: SessionStore, ui_dir: Optional[Path]):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):
            pass

        def _send_json(self, status: int, payload: dict):
            data = json.dumps(payload).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def _handle_api(self, method: str):
            try:
                length = int(self.headers.get("Content-Length") or 0)
                raw = self.rfile.read(length) if length else b""
                body = {}
                if raw:
                    try:
                        body = json.loads(raw)
                    except json.JSONDecodeError:
                        raise ApiError(400, "bad_json", "request body is not valid JSON")
                status, payload = _dispatch(store, method, self.path, body)
                self._send_json(status, payload)
            except ApiError as exc:
                self._send_json(exc.status, exc.body())

        def do_POST(self):
            self._handle_api("POST")

        def do_GET(self):
            if self.path == "/sessions" or self.path.startswith("/sessions/"):
                self._handle_api("GET")
                return
            self._serve_static()

        def _serve_static(self):
            if ui_dir is None:
                self._send_json(404, {"code": "no_ui", "message": "no UI directory configured"})
                return
            rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
            target = (ui_dir / rel).resolve()
            if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
                self._send_json(404, {"code": "not_found", "message": f"no file {rel}"})
                return
            data = target.read_bytes()
            self.send_response(HTTPStatus.OK)
            ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

    return Handler


def default_ui_dir() -> Optional[Path]:
    # repo layout: frontend/dist next to the installed package when running
    # from a checkout; absent otherwise
    here = Path(__file__).resolve()
    for base in here.parents:
        candidate = base / "frontend" / "dist"
        if candidate.is_dir():
            return candidate
    return None


def make_server(host: str = "127.0.0.1", port: int = 8765, ui_dir=None) -> ThreadingHTTPServer:
    store = SessionStore()
    resolved = Path(ui_dir) if ui_dir else default_ui_dir()
    handler = make_handler(store, resolved)
    return ThreadingHTTPServer((host, port), handler)


def serve(host: str = "127.0.0.1", port: int = 8765, ui_dir=None):
    server = make_server(host, port, ui_dir)
    ui = "with UI" if (ui_dir or default_ui_dir()) else "API only"
    print(f"serving on http://{host}:{server.server_address[1]}/ ({ui})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
