"""Local HTTP server feeding the browser viewer.

Endpoints:
  GET  /api/graph      current graph document (canonical bytes, unmodified)
  POST /api/build      rebuild from {"identifier": ..., optional overrides}
  GET  /api/work/{id}  one node's record from the current document
  GET  /...            static viewer assets, when a UI directory is given

Rebuilds run behind a single lock, so readers never observe a partially
swapped document.  Build errors surface as JSON bodies {code, message}.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Callable

from .errors import NotFoundError, OignonError, TransportError

logger = logging.getLogger(__name__)

RebuildFn = Callable[[str | None, dict], bytes]

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
    ".map": "application/json; charset=utf-8",
    ".ico": "image/x-icon",
    ".png": "image/png",
}

_FALLBACK_PAGE = b"""<!doctype html>
<html><head><meta charset="utf-8"><title>oignon</title></head>
<body><h1>oignon</h1>
<p>No viewer assets configured. The API is live:</p>
<ul>
<li><a href="/api/graph">GET /api/graph</a></li>
<li>GET /api/work/{id}</li>
<li>POST /api/build</li>
</ul></body></html>
"""


class GraphApp:
    """Shared state between requests: the document and how to rebuild it."""

    def __init__(
        self,
        document: bytes,
        rebuild: RebuildFn | None = None,
        ui_dir: Path | None = None,
    ) -> None:
        self._document = document
        self._nodes = _index_nodes(document)
        self._rebuild = rebuild
        self._write_lock = threading.Lock()
        self.ui_dir = Path(ui_dir).resolve() if ui_dir is not None else None

    @property
    def document(self) -> bytes:
        return self._document

    def node(self, work_id: str) -> dict | None:
        return self._nodes.get(work_id)

    def rebuild(self, identifier: str | None, overrides: dict) -> bytes:
        if self._rebuild is None:
            raise OignonError("this server cannot rebuild; it serves a fixed document")
        with self._write_lock:
            document = self._rebuild(identifier, overrides)
            nodes = _index_nodes(document)
            self._document = document
            self._nodes = nodes
        return document


def _index_nodes(document: bytes) -> dict[str, dict]:
    payload = json.loads(document)
    return {node["id"]: node for node in payload.get("nodes", [])}


class _Handler(BaseHTTPRequestHandler):
    server_version = "oignon"

    @property
    def app(self) -> GraphApp:
        return self.server.app  # type: ignore[attr-defined]

    def log_message(self, fmt: str, *args) -> None:
        logger.debug("%s " + fmt, self.address_string(), *args)

    def _send(self, status: int, content_type: str, body: bytes) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Cache-Control", "no-store")
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, status: int, code: str, message: str) -> None:
        body = json.dumps({"code": code, "message": message}).encode("utf-8")
        self._send(status, "application/json; charset=utf-8", body)

    def do_GET(self) -> None:  # noqa: N802  (http.server API)
        path = self.path.split("?", 1)[0]
        if path == "/api/graph":
            self._send(200, "application/json; charset=utf-8", self.app.document)
        elif path.startswith("/api/work/"):
            work_id = path[len("/api/work/") :]
            node = self.app.node(work_id)
            if node is None:
                self._send_error_json(404, "not_found", f"{work_id} is not a graph node")
            else:
                body = json.dumps(node, ensure_ascii=False).encode("utf-8")
                self._send(200, "application/json; charset=utf-8", body)
        elif path.startswith("/api/"):
            self._send_error_json(404, "not_found", f"no such endpoint: {path}")
        else:
            self._serve_static(path)

    def do_POST(self) -> None:  # noqa: N802
        if self.path.split("?", 1)[0] != "/api/build":
            self._send_error_json(404, "not_found", "POST is only supported on /api/build")
            return
        try:
            length = int(self.headers.get("Content-Length") or 0)
            payload = json.loads(self.rfile.read(length) or b"{}")
            if not isinstance(payload, dict):
                raise ValueError("body must be a JSON object")
        except (ValueError, json.JSONDecodeError) as exc:
            self._send_error_json(400, "bad_request", str(exc))
            return

        identifier = payload.get("identifier")
        overrides = {k: v for k, v in payload.items() if k != "identifier"}
        try:
            document = self.app.rebuild(identifier, overrides)
        except NotFoundError as exc:
            self._send_error_json(404, "not_found", str(exc))
        except TransportError as exc:
            self._send_error_json(502, "transport", str(exc))
        except OignonError as exc:
            self._send_error_json(500, "build_failed", str(exc))
        else:
            self._send(200, "application/json; charset=utf-8", document)

    def _serve_static(self, path: str) -> None:
        ui_dir = self.app.ui_dir
        if ui_dir is None:
            if path in ("/", "/index.html"):
                self._send(200, "text/html; charset=utf-8", _FALLBACK_PAGE)
            else:
                self._send_error_json(404, "not_found", path)
            return
        relative = path.lstrip("/") or "index.html"
        target = (ui_dir / relative).resolve()
        if not str(target).startswith(str(ui_dir)) or not target.is_file():
            self._send_error_json(404, "not_found", path)
            return
        content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send(200, content_type, target.read_bytes())


class GraphServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, app: GraphApp, host: str = "127.0.0.1", port: int = 8080) -> None:
        self.app = app
        super().__init__((host, port), _Handler)


def make_server(app: GraphApp, host: str = "127.0.0.1", port: int = 8080) -> GraphServer:
    """Bind and return the server; raises OSError when the port is taken."""
    return GraphServer(app, host=host, port=port)
