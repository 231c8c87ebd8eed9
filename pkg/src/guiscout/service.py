"""HTTP service exposing corpus, sessions, ranking, recommendation, and eval.

All endpoints live under ``/api/v1`` and speak JSON. Session mutation
endpoints are serialized per session id; corpus data and embedding caches
are immutable shared state. The built web UI bundle, when configured, is
served from the root path.
"""

from __future__ import annotations

import logging
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .corpus import CorpusIndex, FilterRules, filter_corpus, load_corpus
from .embedding import (
    EmbeddingProviderConfig,
    ProviderKind,
    corpus_content_hash,
    create_embedder,
    embed_corpus,
)
from .errors import (
    ConfigError,
    GuiScoutError,
    NotFoundError,
    ProviderFormatError,
    ProviderTransportError,
    QueryError,
    SelectionError,
    StateConflictError,
)
from .feature_match import AspectGui
from .recommend import (
    DEFAULT_FEW_SHOT,
    LlmProviderConfig,
    LlmProviderKind,
    create_llm_provider,
    load_few_shot_examples,
)
from .session import SessionConfig, SessionEngine, SessionState, SessionStore

logger = logging.getLogger(__name__)

API_PREFIX = "/api/v1"


@dataclass
class ServiceSettings:
    corpus_dir: str
    sessions_dir: str = "./sessions"
    embedding: EmbeddingProviderConfig = field(default_factory=EmbeddingProviderConfig)
    llm: LlmProviderConfig | None = None
    llm_script_path: str | None = None
    llm_endpoint: str | None = None
    alpha: float = 0.5
    beta: float = 0.5
    top_k: int = 30
    k_aspect: int = 15
    max_features: int = 30
    exclude_flags: tuple[str, ...] = ()
    min_components: int | None = None
    static_dir: str | None = None
    few_shot_path: str | None = None
    embedding_cache_path: str | None = None

    @classmethod
    def from_env(cls, env=os.environ) -> "ServiceSettings":
        corpus_dir = env.get("GUISCOUT_CORPUS")
        if not corpus_dir:
            raise ConfigError("GUISCOUT_CORPUS must point at a corpus directory")
        embed_kind = env.get("GUISCOUT_EMBEDDER", "deterministic_hash")
        embedding = EmbeddingProviderConfig(
            provider_kind=ProviderKind(embed_kind),
            dim=int(env.get("GUISCOUT_EMBED_DIM", "256")),
            endpoint=env.get("GUISCOUT_EMBED_ENDPOINT"),
        )
        flags = env.get("GUISCOUT_EXCLUDE_FLAGS", "")
        min_components = env.get("GUISCOUT_MIN_COMPONENTS")
        return cls(
            corpus_dir=corpus_dir,
            sessions_dir=env.get("GUISCOUT_SESSIONS", "./sessions"),
            embedding=embedding,
            llm_script_path=env.get("GUISCOUT_LLM_SCRIPT"),
            llm_endpoint=env.get("GUISCOUT_LLM_ENDPOINT"),
            alpha=float(env.get("GUISCOUT_ALPHA", "0.5")),
            beta=float(env.get("GUISCOUT_BETA", "0.5")),
            top_k=int(env.get("GUISCOUT_TOP_K", "30")),
            k_aspect=int(env.get("GUISCOUT_K_ASPECT", "15")),
            max_features=int(env.get("GUISCOUT_MAX_FEATURES", "30")),
            exclude_flags=tuple(f for f in flags.split(",") if f),
            min_components=int(min_components) if min_components else None,
            static_dir=env.get("GUISCOUT_STATIC"),
            few_shot_path=env.get("GUISCOUT_FEW_SHOT"),
            embedding_cache_path=env.get("GUISCOUT_EMBED_CACHE"),
        )

    def llm_config(self) -> LlmProviderConfig:
        if self.llm is not None:
            return self.llm
        if self.llm_endpoint:
            return LlmProviderConfig(
                provider_kind=LlmProviderKind.REMOTE_HTTP,
                endpoint=self.llm_endpoint,
                max_features=self.max_features,
            )
        if not self.llm_script_path:
            raise ConfigError(
                "an LLM provider is required: set GUISCOUT_LLM_SCRIPT or GUISCOUT_LLM_ENDPOINT"
            )
        return LlmProviderConfig(
            provider_kind=LlmProviderKind.SCRIPTED,
            script_path=self.llm_script_path,
            max_features=self.max_features,
        )


_ERROR_MAP: list[tuple[type, int, str]] = [
    (QueryError, 400, "bad_request"),
    (SelectionError, 400, "bad_request"),
    (ConfigError, 400, "bad_request"),
    (NotFoundError, 404, "not_found"),
    (StateConflictError, 409, "state_conflict"),
    (ProviderTransportError, 503, "provider_unavailable"),
    (ProviderFormatError, 502, "provider_format"),
]


def error_response(exc: Exception) -> JSONResponse:
    for exc_type, status, code in _ERROR_MAP:
        if isinstance(exc, exc_type):
            body = {"code": code, "message": str(exc)}
            raw = getattr(exc, "raw", "")
            if raw:
                body["raw"] = raw
            return JSONResponse(status_code=status, content={"error": body})
    logger.exception("unhandled service error", exc_info=exc)
    return JSONResponse(
        status_code=500,
        content={"error": {"code": "internal", "message": "internal error"}},
    )


class CreateSessionBody(BaseModel):
    app_name: str


class QueryBody(BaseModel):
    text: str


class SelectGuiBody(BaseModel):
    gui_id: str


class AspectRef(BaseModel):
    gui_id: str
    component_id: str | None = None
    score: float = 0.0
    gui_score: float = 0.0


class FeatureDecisionBody(BaseModel):
    decision: str  # select_aspect | text_only | reject
    aspect: AspectRef | None = None


class RecommendationDecisionBody(BaseModel):
    decision: str  # select_aspect | relevant_no_aspect | not_relevant
    aspect: AspectRef | None = None


def session_view(state: SessionState) -> dict:
    view = state.to_dict()
    for i, slot in enumerate(view["slots"]):
        slot["index"] = i
    return view


class SessionRegistry:
    """In-memory session cache with per-session write serialization."""

    def __init__(self, store: SessionStore):
        self.store = store
        self._states: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def get(self, session_id: str) -> SessionState:
        with self._registry_lock:
            state = self._states.get(session_id)
        if state is None:
            state = self.store.load(session_id)
            with self._registry_lock:
                state = self._states.setdefault(session_id, state)
        return state

    def put(self, state: SessionState) -> None:
        with self._registry_lock:
            self._states[state.session_id] = state


def build_engine(settings: ServiceSettings) -> tuple[SessionEngine, CorpusIndex]:
    index = load_corpus(settings.corpus_dir)
    if index.errors:
        for error in index.errors:
            logger.warning("corpus record skipped: %s (%s)", error.source, error.reason)
    rules = FilterRules(
        exclude_flags=frozenset(settings.exclude_flags),
        min_components=settings.min_components,
    )
    if not rules.is_empty():
        index, report = filter_corpus(index, rules)
        logger.info("filtered %d GUIs at startup", report.removed_count)
    embedder = create_embedder(settings.embedding)
    cache = embed_corpus(
        index, embedder, settings.embedding, settings.embedding_cache_path
    )
    few_shot = (
        load_few_shot_examples(settings.few_shot_path)
        if settings.few_shot_path
        else DEFAULT_FEW_SHOT
    )
    llm_config = settings.llm_config()
    config = SessionConfig(
        alpha=settings.alpha,
        beta=settings.beta,
        top_k=settings.top_k,
        k_aspect=settings.k_aspect,
        max_features=settings.max_features,
        embedder_kind=settings.embedding.provider_kind.value,
        embedder_dim=settings.embedding.dim,
        embedder_config_hash=settings.embedding.config_hash(),
        llm_kind=llm_config.provider_kind.value,
        corpus_hash=corpus_content_hash(index),
    )
    engine = SessionEngine(
        index=index,
        embedder=embedder,
        llm_provider=create_llm_provider(llm_config),
        config=config,
        cache=cache,
        store=SessionStore(settings.sessions_dir),
        few_shot=few_shot,
    )
    return engine, index


def create_app(settings: ServiceSettings) -> FastAPI:
    engine, index = build_engine(settings)
    app = FastAPI(title="guiscout", version="0.1.0")
    registry = SessionRegistry(engine.store)
    app.state.engine = engine
    app.state.index = index

    @app.exception_handler(GuiScoutError)
    async def handle_library_error(request: Request, exc: GuiScoutError):
        return error_response(exc)

    @app.exception_handler(ValueError)
    async def handle_value_error(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "bad_request", "message": str(exc)}},
        )

    def health() -> dict:
        return {
            "status": "ok",
            "corpus_size": len(index),
            "embedder": engine.config.embedder_kind,
            "llm": engine.config.llm_kind,
        }

    app.get("/healthz")(health)
    app.get(f"{API_PREFIX}/healthz")(health)

    @app.post(f"{API_PREFIX}/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict:
        state = engine.create_session(body.app_name)
        registry.put(state)
        return {"session": session_view(state)}

    @app.get(API_PREFIX + "/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return {"session": session_view(registry.get(session_id))}

    def _mutate(session_id: str, fn):
        with registry.lock_for(session_id):
            state = registry.get(session_id)
            result = fn(state)
            registry.put(state)
            return state, result

    @app.post(API_PREFIX + "/sessions/{session_id}/slots/{slot}/query")
    def submit_query(session_id: str, slot: int, body: QueryBody) -> dict:
        state, ranking = _mutate(
            session_id, lambda s: engine.submit_gui_query(s, slot, body.text)
        )
        return {
            "ranking": [r.to_dict() for r in ranking],
            "session": session_view(state),
        }

    @app.post(API_PREFIX + "/sessions/{session_id}/slots/{slot}/select-gui")
    def select_gui(session_id: str, slot: int, body: SelectGuiBody) -> dict:
        state, _ = _mutate(
            session_id, lambda s: engine.select_gui(s, slot, body.gui_id)
        )
        return {"session": session_view(state)}

    @app.post(API_PREFIX + "/sessions/{session_id}/slots/{slot}/features")
    def submit_feature(session_id: str, slot: int, body: QueryBody) -> dict:
        state, (feature, aspects) = _mutate(
            session_id, lambda s: engine.submit_feature_query(s, slot, body.text)
        )
        return {
            "feature": feature.to_dict(),
            "aspect_ranking": [a.to_dict() for a in aspects],
            "session": session_view(state),
        }

    @app.post(
        API_PREFIX + "/sessions/{session_id}/slots/{slot}/features/{feature_id}/decision"
    )
    def decide_feature(
        session_id: str, slot: int, feature_id: str, body: FeatureDecisionBody
    ) -> dict:
        aspect = (
            AspectGui(**body.aspect.model_dump()) if body.aspect is not None else None
        )
        if body.decision == "select_aspect":
            if aspect is None:
                raise SelectionError("select_aspect decision requires an aspect")
            fn = lambda s: engine.select_aspect_gui(s, slot, feature_id, aspect=aspect)
        elif body.decision == "text_only":
            fn = lambda s: engine.select_aspect_gui(
                s, slot, feature_id, keep_text_only=True
            )
        elif body.decision == "reject":
            fn = lambda s: engine.select_aspect_gui(s, slot, feature_id)
        else:
            raise QueryError(f"unknown feature decision '{body.decision}'")
        state, _ = _mutate(session_id, fn)
        return {"session": session_view(state)}

    @app.post(API_PREFIX + "/sessions/{session_id}/slots/{slot}/recommendations")
    def request_recommendations(session_id: str, slot: int) -> dict:
        state, recommendations = _mutate(
            session_id, lambda s: engine.request_recommendations(s, slot)
        )
        return {
            "recommendations": [r.to_dict() for r in recommendations],
            "session": session_view(state),
        }

    @app.post(
        API_PREFIX
        + "/sessions/{session_id}/slots/{slot}/recommendations/{feature_id}/decision"
    )
    def decide_recommendation(
        session_id: str,
        slot: int,
        feature_id: str,
        body: RecommendationDecisionBody,
    ) -> dict:
        aspect = (
            AspectGui(**body.aspect.model_dump()) if body.aspect is not None else None
        )
        state, _ = _mutate(
            session_id,
            lambda s: engine.respond_to_recommendation(
                s, slot, feature_id, body.decision, aspect=aspect
            ),
        )
        return {"session": session_view(state)}

    @app.post(API_PREFIX + "/sessions/{session_id}/slots/{slot}/complete")
    def complete_slot(session_id: str, slot: int) -> dict:
        state, _ = _mutate(session_id, lambda s: engine.complete_slot(s, slot))
        return {"session": session_view(state)}

    @app.get(API_PREFIX + "/sessions/{session_id}/artifact")
    def get_artifact(session_id: str) -> dict:
        state = registry.get(session_id)
        return engine.export_artifact(state).to_dict()

    @app.get(API_PREFIX + "/guis/{gui_id}")
    def get_gui(gui_id: str) -> dict:
        document = index.get(gui_id)
        if document is None:
            raise NotFoundError(f"unknown gui '{gui_id}'")
        return document.to_dict()

    @app.get(API_PREFIX + "/guis/{gui_id}/screenshot")
    def get_screenshot(gui_id: str):
        document = index.get(gui_id)
        if document is None:
            raise NotFoundError(f"unknown gui '{gui_id}'")
        if not document.screenshot_ref:
            raise NotFoundError(f"gui '{gui_id}' has no screenshot")
        path = Path(settings.corpus_dir) / document.screenshot_ref
        if not path.exists():
            raise NotFoundError(f"screenshot file missing for '{gui_id}'")
        return FileResponse(path)

    if settings.static_dir and Path(settings.static_dir).is_dir():
        app.mount(
            "/", StaticFiles(directory=settings.static_dir, html=True), name="ui"
        )

    return app


def serve(settings: ServiceSettings, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Run the service until interrupted; startup failures exit nonzero."""
    import uvicorn

    app = create_app(settings)
    uvicorn.run(app, host=host, port=port)
