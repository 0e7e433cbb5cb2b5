"""Session-aware HTTP service and the corpus build entry point.

The service owns: cookie sessions mapped 1:1 to stored profiles, one
SessionRuntime per live session ticked by a background scheduler, the
periodic social-point recompute, and the JSON endpoint surface consumed
by the panel frontend. All state changes flow through either a user
action handler or the periodic tick; there is no third path.

Framework-free on purpose: stdlib http.server carries the desk-scale
load, and the core NavigationService is plain methods, so tests drive it
in-process on a virtual clock.
"""

from __future__ import annotations

import copy
import json
import os
import secrets
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from http.cookies import SimpleCookie
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from evonav import social
from evonav.clock import Clock, RealClock
from evonav.engine import EngineConfig
from evonav.errors import (
    AlreadyFavorite,
    MapTooSmall,
    NavError,
    NoSignal,
    NotAFavorite,
    NotInSet,
    UnknownDocument,
)
from evonav.mapping import KnowledgeMap, build_knowledge_map, load_map, save_map
from evonav.session import SessionRuntime
from evonav.store import ProfileStore
from evonav.text import RawDocument, default_stop_words, load_corpus, load_stop_words
from evonav.users import UserProfile

ENV_PREFIX = "EVONAV_"
SESSION_COOKIE = "evonav_session"

_ENGINE_FIELDS = {
    "set_size": int,
    "links_replace": int,
    "fitness_click_modifier": int,
    "ageing_interval": float,
    "refresh_interval": float,
    "mutation_probability": float,
    "history_recent_iterations": int,
    "favorites_fitness_const": int,
    "dormant_count": float,
    "rng_seed": int,
}

_SERVICE_FIELDS = {
    "listen_address": str,
    "corpus_path": str,
    "map_path": str,
    "store_path": str,
    "social_recompute_period": float,
    "suggestion_count": int,
    "static_dir": str,
}


@dataclass
class ServiceConfig:
    engine: EngineConfig = field(default_factory=EngineConfig)
    listen_address: str = "127.0.0.1:8080"
    corpus_path: str = ""
    map_path: str = ""
    store_path: str = ""
    social_recompute_period: float = 60.0
    suggestion_count: int = 7
    static_dir: str = ""

    def __post_init__(self):
        if self.suggestion_count > self.engine.set_size:
            raise ValueError("suggestion_count cannot exceed set_size")

    @property
    def host_port(self) -> tuple[str, int]:
        host, _, port = self.listen_address.rpartition(":")
        return host or "127.0.0.1", int(port)


def parse_config_file(path: str | Path) -> ServiceConfig:
    """Flat key = value file; every key matches a config field name.

    Environment variables win over the file: EVONAV_<KEY> (upper-case).
    """
    values: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    for key in list(_ENGINE_FIELDS) + list(_SERVICE_FIELDS):
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            values[key] = env

    engine_kwargs = {}
    service_kwargs = {}
    for key, raw in values.items():
        if key in _ENGINE_FIELDS:
            engine_kwargs[key] = _ENGINE_FIELDS[key](raw)
        elif key in _SERVICE_FIELDS:
            service_kwargs[key] = _SERVICE_FIELDS[key](raw)
        else:
            raise ValueError(f"unknown config key: {key}")
    return ServiceConfig(engine=EngineConfig(**engine_kwargs), **service_kwargs)


def ingest_and_build(
    corpus_path: str | Path,
    out_path: str | Path,
    seed: int,
    clusters: int = 10,
    target_dim: int | None = None,
    variance_threshold: float = 0.90,
    stop_words_path: str | Path | None = None,
) -> dict:
    """CLI `build`: corpus -> persisted map file. Returns a printable summary."""
    corpus = load_corpus(corpus_path)
    if len(corpus) < clusters:
        raise MapTooSmall(f"{len(corpus)} documents cannot fill {clusters} panel slots")
    stop_words = (
        load_stop_words(stop_words_path) if stop_words_path else default_stop_words()
    )
    kmap = build_knowledge_map(
        corpus,
        stop_words,
        cluster_count=clusters,
        seed=seed,
        target_dim=target_dim,
        variance_threshold=variance_threshold,
    )
    save_map(kmap, out_path)
    counts = {c: len(kmap.cluster_members(c)) for c in range(1, clusters + 1)}
    return {
        "corpus_size": kmap.size,
        "vocabulary_size": len(kmap.vocabulary),
        "dimensionality": kmap.dimensionality,
        "cluster_counts": counts,
        "map_path": str(out_path),
        "config_hash": kmap.config_hash,
    }


class _Session:
    __slots__ = ("runtime", "lock", "request_cache")

    def __init__(self, runtime: SessionRuntime):
        self.runtime = runtime
        self.lock = threading.Lock()
        self.request_cache: OrderedDict[str, tuple[int, dict]] = OrderedDict()


class NavigationService:
    """The endpoint surface, independent of any HTTP transport."""

    def __init__(
        self,
        config: ServiceConfig,
        kmap: KnowledgeMap,
        corpus: list[RawDocument],
        store: ProfileStore,
        clock: Clock | None = None,
    ):
        self.config = config
        self.kmap = kmap
        self.documents = {d.doc_id: d for d in corpus}
        self.store = store
        self.clock = clock or RealClock()
        self.sessions: dict[str, _Session] = {}
        self.profiles: dict[str, UserProfile] = store.load_all_profiles()
        self._registry_lock = threading.Lock()
        self._session_counter = 0
        self._social_next_at = self.clock.now() + config.social_recompute_period
        self._snapshot: dict[str, UserProfile] = {}
        self._rebuild_snapshot()

    # -- session management --------------------------------------------------

    def _new_token(self) -> str:
        return secrets.token_hex(16)  # 128 bits

    def _create_session(self) -> tuple[str, _Session]:
        token = self._new_token()
        now = self.clock.now()
        profile = UserProfile(user_id=token, created_at=now, last_action_at=now)
        self.profiles[token] = profile
        self.store.save_profile(profile)
        return token, self._spawn_runtime(token, profile)

    def _spawn_runtime(self, token: str, profile: UserProfile) -> _Session:
        self._session_counter += 1
        rng = np.random.default_rng([self.config.engine.rng_seed, self._session_counter])
        runtime = SessionRuntime(
            profile,
            self.kmap,
            self.config.engine,
            rng,
            self.clock,
            store=self.store,
        )
        runtime.start()
        session = _Session(runtime)
        self.sessions[token] = session
        return session

    def _resolve_session(self, token: str | None) -> tuple[str, _Session, bool]:
        """Returns (token, session, created). Unknown non-empty tokens -> 410."""
        with self._registry_lock:
            if token:
                session = self.sessions.get(token)
                if session is not None:
                    return token, session, False
                profile = self.profiles.get(token) or self.store.load_profile(token)
                if profile is None:
                    raise SessionExpired(token)
                self.profiles[token] = profile
                return token, self._spawn_runtime(token, profile), False
            token, session = self._create_session()
            return token, session, True

    # -- periodic work ---------------------------------------------------------

    def tick_all(self) -> None:
        """One scheduler beat: advance every live session, then social upkeep."""
        with self._registry_lock:
            sessions = list(self.sessions.values())
        for session in sessions:
            with session.lock:
                session.runtime.tick()
        now = self.clock.now()
        if now >= self._social_next_at - 1e-9:
            self._social_next_at = now + self.config.social_recompute_period
            self.recompute_social_points()

    def recompute_social_points(self) -> None:
        """Refresh stored interest points for active users; dormant users keep
        their last stored point (their history is not changing anyway)."""
        now = self.clock.now()
        for profile in list(self.profiles.values()):
            if profile.dormant:
                continue
            try:
                profile.social_point = social.compute_social_interest_point(
                    profile, self.kmap, now
                )
                self.store.save_profile(profile)
            except NoSignal:
                pass
        self._rebuild_snapshot()

    def _rebuild_snapshot(self) -> None:
        # immutable copies for lock-free suggestion scoring
        self._snapshot = {uid: copy.deepcopy(p) for uid, p in self.profiles.items()}

    # -- request handling --------------------------------------------------------

    def handle(
        self, method: str, path: str, body: dict | None, token: str | None
    ) -> tuple[int, dict, str | None]:
        """Dispatch one request; returns (status, payload, token_to_set)."""
        if method == "GET" and path == "/healthz":
            return 200, self._health(), None
        try:
            token, session, created = self._resolve_session(token)
        except SessionExpired:
            return 410, {"error": "SessionExpired"}, None
        set_cookie = token if created else None
        try:
            with session.lock:
                status, payload = self._dispatch(method, path, body or {}, session)
            return status, payload, set_cookie
        except NavError as err:
            return _error_status(err), {"error": type(err).__name__, "detail": str(err)}, set_cookie
        except (KeyError, TypeError, ValueError) as err:
            return 400, {"error": "BadRequest", "detail": str(err)}, set_cookie

    def _dispatch(self, method: str, path: str, body: dict, session: _Session) -> tuple[int, dict]:
        runtime = session.runtime
        if method == "GET" and path == "/set":
            return 200, runtime.view()
        if method == "POST" and path == "/click":
            request_id = body.get("request_id")
            if request_id is not None and request_id in session.request_cache:
                return session.request_cache[request_id]
            runtime.click(str(body["doc_id"]))
            response = (200, runtime.view())
            if request_id is not None:
                session.request_cache[request_id] = response
                while len(session.request_cache) > 128:
                    session.request_cache.popitem(last=False)
            return response
        if method == "POST" and path == "/favorite":
            runtime.add_favorite(str(body["doc_id"]))
            return 200, runtime.favorites_view()
        if method == "DELETE" and path.startswith("/favorite/"):
            runtime.remove_favorite(path.removeprefix("/favorite/"))
            return 200, runtime.favorites_view()
        if method == "GET" and path == "/favorites":
            return 200, runtime.favorites_view()
        if method == "GET" and path == "/suggestions":
            return 200, self._suggestions(runtime)
        if method == "POST" and path == "/reset":
            runtime.reset()
            return 200, runtime.view()
        if method == "POST" and path == "/pause":
            runtime.set_paused(bool(body["paused"]))
            return 200, runtime.view()
        if method == "POST" and path == "/refresh_interval":
            runtime.set_refresh_interval(float(body["secs"]))
            return 200, runtime.view()
        if method == "GET" and path.startswith("/doc/"):
            return 200, self._document(path.removeprefix("/doc/"))
        return 404, {"error": "NoSuchEndpoint", "detail": path}

    def _suggestions(self, runtime: SessionRuntime) -> dict:
        current = runtime.profile
        others = [p for uid, p in self._snapshot.items() if uid != current.user_id]
        ranked = social.suggestions(
            current,
            self.config.suggestion_count,
            [current, *others],
            now=self.clock.now(),
            exclude=set(runtime.nav_set.doc_ids()),
        )
        return {
            "suggestions": [
                {
                    "doc_id": s.doc_id,
                    "title": self.kmap.title_of(s.doc_id),
                    "loi": round(s.loi, 6),
                    "contributing_users": s.contributing_users,
                }
                for s in ranked
            ]
        }

    def _document(self, doc_id: str) -> dict:
        doc = self.documents.get(doc_id)
        if doc is None:
            raise UnknownDocument(doc_id)
        return {"doc_id": doc.doc_id, "title": doc.title, "body": doc.body, "uri": doc.source_uri}

    def _health(self) -> dict:
        return {
            "status": "ok",
            "corpus_size": self.kmap.size,
            "map_hash": self.kmap.config_hash,
            "dimensionality": self.kmap.dimensionality,
        }


class SessionExpired(Exception):
    pass


def _error_status(err: NavError) -> int:
    if isinstance(err, NotInSet):
        return 409
    if isinstance(err, AlreadyFavorite):
        return 409
    if isinstance(err, (NotAFavorite, UnknownDocument)):
        return 404
    return 400


# -- stdlib HTTP transport ----------------------------------------------------


class _Handler(BaseHTTPRequestHandler):
    service: NavigationService = None  # set by serve()
    static_dir: Path | None = None
    protocol_version = "HTTP/1.1"

    def log_message(self, *args):  # quiet by default
        pass

    def _token(self) -> str | None:
        cookie_header = self.headers.get("Cookie")
        if not cookie_header:
            return None
        cookie = SimpleCookie()
        cookie.load(cookie_header)
        morsel = cookie.get(SESSION_COOKIE)
        return morsel.value if morsel else None

    def _body(self) -> dict | None:
        length = int(self.headers.get("Content-Length") or 0)
        if length == 0:
            return {}
        raw = self.rfile.read(length)
        try:
            parsed = json.loads(raw)
        except json.JSONDecodeError:
            return None
        return parsed if isinstance(parsed, dict) else None

    def _respond(self, status: int, payload: dict, token: str | None = None) -> None:
        data = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        if token:
            self.send_header(
                "Set-Cookie", f"{SESSION_COOKIE}={token}; Path=/; HttpOnly; SameSite=Lax"
            )
        self.end_headers()
        self.wfile.write(data)

    def _serve_static(self, path: str) -> bool:
        if self.static_dir is None:
            return False
        rel = path.removeprefix("/ui").lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) or not target.is_file():
            return False
        content_types = {
            ".html": "text/html",
            ".js": "text/javascript",
            ".css": "text/css",
            ".map": "application/json",
        }
        data = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", content_types.get(target.suffix, "application/octet-stream"))
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)
        return True

    def _handle(self, method: str) -> None:
        body = self._body()
        if body is None:
            self._respond(400, {"error": "BadRequest", "detail": "body must be a JSON object"})
            return
        status, payload, token = self.service.handle(method, self.path, body, self._token())
        self._respond(status, payload, token)

    def do_GET(self):
        if self.path == "/" or self.path.startswith("/ui"):
            if self._serve_static(self.path):
                return
        self._handle("GET")

    def do_POST(self):
        self._handle("POST")

    def do_DELETE(self):
        self._handle("DELETE")


def build_service(config: ServiceConfig, clock: Clock | None = None) -> NavigationService:
    for name, path in (("map_path", config.map_path), ("corpus_path", config.corpus_path)):
        if not path or not Path(path).exists():
            raise FileNotFoundError(f"{name} not found: {path!r}")
    kmap = load_map(config.map_path)
    corpus = load_corpus(config.corpus_path)
    store = ProfileStore(config.store_path or ":memory:")
    return NavigationService(config, kmap, corpus, store, clock=clock)


def serve(config: ServiceConfig) -> None:
    """CLI `serve`: run the HTTP service plus the periodic scheduler."""
    service = build_service(config)
    stop = threading.Event()

    def scheduler():
        interval = config.engine.ageing_interval
        while not stop.wait(interval):
            service.tick_all()

    thread = threading.Thread(target=scheduler, daemon=True, name="evonav-scheduler")
    thread.start()

    handler = type(
        "BoundHandler",
        (_Handler,),
        {
            "service": service,
            "static_dir": Path(config.static_dir) if config.static_dir else None,
        },
    )
    host, port = config.host_port
    server = ThreadingHTTPServer((host, port), handler)
    print(f"serving on http://{host}:{port} (corpus: {service.kmap.size} docs)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        stop.set()
        server.server_close()
        service.store.close()
