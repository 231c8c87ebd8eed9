"""Event-sourced elicitation sessions.

A session is a sequence of GUI slots, each walking the dialogue loop:
query for GUIs, browse the ranking, elicit features against it, review
proactive recommendations, complete. Every state change is an appended
event; replaying the log from an empty state reconstructs the session
exactly, including all scores, which is what makes sessions auditable and
replay-testable.

Commands validate their phase guard first and never mutate state when the
guard fails. Results that depend on the corpus, the embedder, or the LLM
provider are recorded in the event payload, so replay needs none of them.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Mapping

from .corpus import CorpusIndex
from .embedding import Embedder, EmbeddingCache
from .errors import (
    NotFoundError,
    QueryError,
    SelectionError,
    StateConflictError,
)
from .feature_match import (
    CONFIRMED_STATUSES,
    DEFAULT_K_ASPECT,
    AspectGui,
    FeatureOrigin,
    FeatureQuery,
    FeatureStatus,
    rank_aspect_guis,
)
from .ranking import RankedGui, RankingConfig, rank_guis, rerank
from .recommend import (
    DEFAULT_FEW_SHOT,
    DEFAULT_MAX_FEATURES,
    FeatureRecommendation,
    LlmProvider,
    RecommendationRequest,
    recommend_features,
)

ARTIFACT_SCHEMA_VERSION = 1
SESSION_FILE_FORMAT = 1


class SlotPhase(str, Enum):
    AWAITING_QUERY = "awaiting_query"
    BROWSING_RANKING = "browsing_ranking"
    FEATURE_ELICITATION = "feature_elicitation"
    RECOMMENDATION_REVIEW = "recommendation_review"
    DONE = "done"


# Phase guard table: a command invoked outside its allowed phases raises
# StateConflictError and leaves the session untouched.
GUARDS: dict[str, frozenset[SlotPhase]] = {
    "submit_gui_query": frozenset(
        {SlotPhase.AWAITING_QUERY, SlotPhase.BROWSING_RANKING}
    ),
    "select_gui": frozenset(
        {
            SlotPhase.BROWSING_RANKING,
            SlotPhase.FEATURE_ELICITATION,
            SlotPhase.RECOMMENDATION_REVIEW,
        }
    ),
    "submit_feature_query": frozenset(
        {SlotPhase.BROWSING_RANKING, SlotPhase.FEATURE_ELICITATION}
    ),
    "select_aspect_gui": frozenset(
        {SlotPhase.FEATURE_ELICITATION, SlotPhase.RECOMMENDATION_REVIEW}
    ),
    "request_recommendations": frozenset(
        {
            SlotPhase.BROWSING_RANKING,
            SlotPhase.FEATURE_ELICITATION,
            SlotPhase.RECOMMENDATION_REVIEW,
        }
    ),
    "respond_to_recommendation": frozenset({SlotPhase.RECOMMENDATION_REVIEW}),
    "complete_slot": frozenset(
        {
            SlotPhase.BROWSING_RANKING,
            SlotPhase.FEATURE_ELICITATION,
            SlotPhase.RECOMMENDATION_REVIEW,
        }
    ),
}


class AspectDecision(str, Enum):
    SELECT_ASPECT = "select_aspect"
    TEXT_ONLY = "text_only"
    REJECT = "reject"


class RecommendationDecision(str, Enum):
    SELECT_ASPECT = "select_aspect"
    RELEVANT_NO_ASPECT = "relevant_no_aspect"
    NOT_RELEVANT = "not_relevant"


@dataclass(frozen=True)
class Event:
    seq: int
    ts: str
    type: str
    payload: dict

    def to_dict(self) -> dict:
        return {"seq": self.seq, "ts": self.ts, "type": self.type, "payload": self.payload}

    @classmethod
    def from_dict(cls, raw: Mapping) -> "Event":
        return cls(seq=raw["seq"], ts=raw["ts"], type=raw["type"], payload=raw["payload"])


@dataclass(frozen=True)
class SessionConfig:
    """Snapshot of every knob the session's numbers depend on."""

    alpha: float = 0.5
    beta: float = 0.5
    top_k: int = 30
    k_aspect: int = DEFAULT_K_ASPECT
    max_features: int = DEFAULT_MAX_FEATURES
    embedder_kind: str = "deterministic_hash"
    embedder_dim: int = 256
    embedder_config_hash: str = ""
    llm_kind: str = "scripted"
    corpus_hash: str = ""

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "top_k": self.top_k,
            "k_aspect": self.k_aspect,
            "max_features": self.max_features,
            "embedder_kind": self.embedder_kind,
            "embedder_dim": self.embedder_dim,
            "embedder_config_hash": self.embedder_config_hash,
            "llm_kind": self.llm_kind,
            "corpus_hash": self.corpus_hash,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "SessionConfig":
        return cls(**dict(raw))

    def ranking_config(self) -> RankingConfig:
        return RankingConfig(alpha=self.alpha, beta=self.beta, top_k=self.top_k)


@dataclass
class GuiSlot:
    """Dialogue state for one GUI of the app prototype."""

    nlr_gui: str = ""
    phase: SlotPhase = SlotPhase.AWAITING_QUERY
    current_ranking: list[RankedGui] = field(default_factory=list)
    selected_gui: str | None = None
    features: list[FeatureQuery] = field(default_factory=list)
    aspect_selections: dict[str, AspectGui] = field(default_factory=dict)
    pending_recommendations: list[FeatureRecommendation] = field(default_factory=list)
    unmatched_requirements: list[str] = field(default_factory=list)
    # Last aspect ranking shown per open feature; selections must reference it.
    open_aspect_rankings: dict[str, list[AspectGui]] = field(default_factory=dict)
    recommendation_generation: int = 0

    def confirmed_features(self) -> list[FeatureQuery]:
        return [f for f in self.features if f.status in CONFIRMED_STATUSES]

    def find_feature(self, feature_id: str) -> FeatureQuery | None:
        for feat in self.features:
            if feat.feature_id == feature_id:
                return feat
        return None

    def to_dict(self) -> dict:
        return {
            "nlr_gui": self.nlr_gui,
            "phase": self.phase.value,
            "current_ranking": [r.to_dict() for r in self.current_ranking],
            "selected_gui": self.selected_gui,
            "features": [f.to_dict() for f in self.features],
            "aspect_selections": {
                fid: a.to_dict() for fid, a in self.aspect_selections.items()
            },
            "pending_recommendations": [
                r.to_dict() for r in self.pending_recommendations
            ],
            "unmatched_requirements": list(self.unmatched_requirements),
            "open_aspect_rankings": {
                fid: [a.to_dict() for a in ranking]
                for fid, ranking in self.open_aspect_rankings.items()
            },
            "recommendation_generation": self.recommendation_generation,
        }


@dataclass
class SessionState:
    session_id: str
    app_name: str
    config: SessionConfig
    slots: list[GuiSlot] = field(default_factory=list)
    active_slot_index: int | None = None
    created_at: str = ""
    updated_at: str = ""
    feature_counter: int = 0
    event_log: list[Event] = field(default_factory=list)

    def active_slot(self) -> GuiSlot | None:
        if self.active_slot_index is None:
            return None
        return self.slots[self.active_slot_index]

    def completed_slots(self) -> list[GuiSlot]:
        return [s for s in self.slots if s.phase == SlotPhase.DONE]

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "app_name": self.app_name,
            "config": self.config.to_dict(),
            "slots": [s.to_dict() for s in self.slots],
            "active_slot_index": self.active_slot_index,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
            "feature_counter": self.feature_counter,
        }


def _apply_session_created(state: SessionState, payload: dict) -> None:
    state.session_id = payload["session_id"]
    state.app_name = payload["app_name"]
    state.config = SessionConfig.from_dict(payload["config"])


def _apply_slot_opened(state: SessionState, payload: dict) -> None:
    state.slots.append(GuiSlot())
    state.active_slot_index = payload["slot"]


def _apply_gui_query_submitted(state: SessionState, payload: dict) -> None:
    slot = state.slots[payload["slot"]]
    slot.nlr_gui = payload["text"]
    slot.current_ranking = [RankedGui.from_dict(r) for r in payload["ranking"]]
    slot.selected_gui = None
    slot.pending_recommendations = []
    slot.open_aspect_rankings = {}
    slot.phase = SlotPhase.BROWSING_RANKING


def _apply_gui_selected(state: SessionState, payload: dict) -> None:
    slot = state.slots[payload["slot"]]
    slot.selected_gui = payload["gui_id"]


def _apply_feature_query_submitted(state: SessionState, payload: dict) -> None:
    slot = state.slots[payload["slot"]]
    feature = FeatureQuery.from_dict(payload["feature"])
    slot.features.append(feature)
    slot.open_aspect_rankings[feature.feature_id] = [
        AspectGui.from_dict(a) for a in payload["aspect_ranking"]
    ]
    state.feature_counter += 1
    slot.phase = SlotPhase.FEATURE_ELICITATION


def _decide_feature(
    slot: GuiSlot, feature: FeatureQuery, decision: str, payload: dict
) -> None:
    if decision in (AspectDecision.SELECT_ASPECT.value,):
        feature.transition(FeatureStatus.CONFIRMED_WITH_ASPECT)
        slot.aspect_selections[feature.feature_id] = AspectGui.from_dict(
            payload["aspect"]
        )
        slot.current_ranking = [RankedGui.from_dict(r) for r in payload["reranked"]]
    elif decision in (
        AspectDecision.TEXT_ONLY.value,
        RecommendationDecision.RELEVANT_NO_ASPECT.value,
    ):
        feature.transition(FeatureStatus.CONFIRMED_TEXT_ONLY)
        slot.unmatched_requirements.append(feature.text)
    else:
        feature.transition(FeatureStatus.REJECTED)


def _apply_aspect_decided(state: SessionState, payload: dict) -> None:
    slot = state.slots[payload["slot"]]
    feature = slot.find_feature(payload["feature_id"])
    assert feature is not None
    _decide_feature(slot, feature, payload["decision"], payload)
    slot.open_aspect_rankings.pop(payload["feature_id"], None)


def _apply_recommendations_requested(state: SessionState, payload: dict) -> None:
    slot = state.slots[payload["slot"]]
    slot.pending_recommendations = [
        FeatureRecommendation.from_dict(r) for r in payload["recommendations"]
    ]
    slot.recommendation_generation = payload["generation"]
    slot.phase = SlotPhase.RECOMMENDATION_REVIEW


def _apply_recommendation_decided(state: SessionState, payload: dict) -> None:
    slot = state.slots[payload["slot"]]
    feature_id = payload["feature_id"]
    remaining: list[FeatureRecommendation] = []
    decided: FeatureRecommendation | None = None
    for rec in slot.pending_recommendations:
        if rec.feature.feature_id == feature_id and decided is None:
            decided = rec
        else:
            remaining.append(rec)
    assert decided is not None
    slot.pending_recommendations = remaining
    feature = FeatureQuery(
        feature_id=decided.feature.feature_id,
        text=decided.feature.text,
        origin=FeatureOrigin.RECOMMENDED,
    )
    slot.features.append(feature)
    _decide_feature(slot, feature, payload["decision"], payload)


def _apply_slot_completed(state: SessionState, payload: dict) -> None:
    state.slots[payload["slot"]].phase = SlotPhase.DONE


_APPLIERS: dict[str, Callable[[SessionState, dict], None]] = {
    "session_created": _apply_session_created,
    "slot_opened": _apply_slot_opened,
    "gui_query_submitted": _apply_gui_query_submitted,
    "gui_selected": _apply_gui_selected,
    "feature_query_submitted": _apply_feature_query_submitted,
    "aspect_decided": _apply_aspect_decided,
    "recommendations_requested": _apply_recommendations_requested,
    "recommendation_decided": _apply_recommendation_decided,
    "slot_completed": _apply_slot_completed,
}


def apply_event(state: SessionState, event: Event) -> None:
    """Fold one event into the state; pure with respect to the payload."""
    _APPLIERS[event.type](state, event.payload)
    if not state.created_at:
        state.created_at = event.ts
    state.updated_at = event.ts
    state.event_log.append(event)


def replay_events(events: list[Event]) -> SessionState:
    """Reconstruct a session purely from its event log."""
    if not events or events[0].type != "session_created":
        raise ValueError("event log must start with session_created")
    state = SessionState(session_id="", app_name="", config=SessionConfig())
    for event in events:
        apply_event(state, event)
    return state


@dataclass(frozen=True)
class AspectRecord:
    """One confirmed aspect in the exported artifact."""

    feature_text: str
    gui_id: str
    component_id: str | None
    score: float
    gui_score: float

    def to_dict(self) -> dict:
        return {
            "feature_text": self.feature_text,
            "gui_id": self.gui_id,
            "component_id": self.component_id,
            "score": self.score,
            "gui_score": self.gui_score,
        }


@dataclass(frozen=True)
class SlotRecord:
    nlr_gui: str
    selected_gui: str
    aspect_guis: tuple[AspectRecord, ...]
    textual_requirements: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "nlr_gui": self.nlr_gui,
            "selected_gui": self.selected_gui,
            "aspect_guis": [a.to_dict() for a in self.aspect_guis],
            "textual_requirements": list(self.textual_requirements),
        }


@dataclass(frozen=True)
class PrototypeArtifact:
    """The exported requirements artifact: one record per completed slot."""

    app_name: str
    slots: tuple[SlotRecord, ...]
    exported_at: str
    corpus_hash: str
    config: SessionConfig

    def to_dict(self) -> dict:
        return {
            "schema_version": ARTIFACT_SCHEMA_VERSION,
            "app_name": self.app_name,
            "slots": [s.to_dict() for s in self.slots],
            "exported_at": self.exported_at,
            "corpus_hash": self.corpus_hash,
            "config": self.config.to_dict(),
        }

    def to_json_bytes(self) -> bytes:
        return (
            json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
            + "\n"
        ).encode("utf-8")


def summary_markdown(artifact: PrototypeArtifact) -> str:
    """Human-readable companion document for the exported artifact."""
    lines = [f"# GUI prototype requirements: {artifact.app_name}", ""]
    lines.append(f"Exported: {artifact.exported_at}")
    lines.append(f"Screens: {len(artifact.slots)}")
    lines.append("")
    for i, slot in enumerate(artifact.slots, start=1):
        lines.append(f"## Screen {i}: {slot.nlr_gui}")
        lines.append("")
        lines.append(f"Selected GUI: `{slot.selected_gui}`")
        lines.append("")
        if slot.aspect_guis:
            lines.append("Confirmed features with matching aspect-GUIs:")
            for record in slot.aspect_guis:
                lines.append(
                    f"- {record.feature_text} -> `{record.gui_id}`"
                    f" / `{record.component_id}` (score {record.gui_score:.3f})"
                )
            lines.append("")
        if slot.textual_requirements:
            lines.append("Additional textual requirements (no aspect-GUI found):")
            for text in slot.textual_requirements:
                lines.append(f"- {text}")
            lines.append("")
    return "\n".join(lines)


class SessionStore:
    """One JSON file per session: the event log plus a state snapshot."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.json"

    def save(self, state: SessionState) -> None:
        payload = {
            "format": SESSION_FILE_FORMAT,
            "snapshot": state.to_dict(),
            "events": [e.to_dict() for e in state.event_log],
        }
        self._path(state.session_id).write_text(
            json.dumps(payload, ensure_ascii=False), encoding="utf-8"
        )

    def load(self, session_id: str) -> SessionState:
        path = self._path(session_id)
        if not path.exists():
            raise NotFoundError(f"unknown session '{session_id}'")
        payload = json.loads(path.read_text(encoding="utf-8"))
        if payload.get("format") != SESSION_FILE_FORMAT:
            raise ValueError(f"unsupported session file format {payload.get('format')!r}")
        return replay_events([Event.from_dict(e) for e in payload["events"]])

    def list_sessions(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).exists()


def _default_clock() -> str:
    return datetime.now(timezone.utc).isoformat()


def _default_id_factory() -> str:
    return uuid.uuid4().hex


class SessionEngine:
    """Executes session commands against shared, read-only corpus state.

    The clock and session-id factory are injectable so that demo and test
    runs are reproducible end to end.
    """

    def __init__(
        self,
        index: CorpusIndex,
        embedder: Embedder,
        llm_provider: LlmProvider,
        config: SessionConfig,
        cache: EmbeddingCache | None = None,
        store: SessionStore | None = None,
        few_shot=DEFAULT_FEW_SHOT,
        clock: Callable[[], str] = _default_clock,
        id_factory: Callable[[], str] = _default_id_factory,
    ):
        self.index = index
        self.embedder = embedder
        self.llm_provider = llm_provider
        self.config = config
        self.cache = cache
        self.store = store
        self.few_shot = few_shot
        self.clock = clock
        self.id_factory = id_factory

    # -- internals ---------------------------------------------------------

    def _record(self, state: SessionState, type_: str, payload: dict) -> None:
        event = Event(
            seq=len(state.event_log) + 1, ts=self.clock(), type=type_, payload=payload
        )
        apply_event(state, event)
        if self.store is not None:
            self.store.save(state)

    def _guarded_slot(
        self, state: SessionState, slot_index: int, operation: str
    ) -> GuiSlot:
        if slot_index < 0 or slot_index >= len(state.slots):
            raise NotFoundError(f"no slot {slot_index} in session")
        if slot_index != state.active_slot_index:
            raise StateConflictError(operation, state.slots[slot_index].phase.value,
                                     "only the active slot accepts commands")
        slot = state.slots[slot_index]
        if slot.phase not in GUARDS[operation]:
            raise StateConflictError(operation, slot.phase.value)
        return slot

    # -- commands ----------------------------------------------------------

    def create_session(self, app_name: str) -> SessionState:
        state = SessionState(session_id="", app_name="", config=self.config)
        self._record(
            state,
            "session_created",
            {
                "session_id": self.id_factory(),
                "app_name": app_name,
                "config": self.config.to_dict(),
            },
        )
        return state

    def submit_gui_query(
        self, state: SessionState, slot_index: int, text: str
    ) -> list[RankedGui]:
        if not text.strip():
            raise QueryError("GUI query is empty")
        if not state.slots and slot_index == 0:
            # First command of a fresh session opens its first slot.
            self._record(state, "slot_opened", {"slot": 0})
        slot = self._guarded_slot(state, slot_index, "submit_gui_query")
        ranking = rank_guis(
            text, self.index, self.config.ranking_config(), self.embedder, self.cache
        )
        self._record(
            state,
            "gui_query_submitted",
            {
                "slot": slot_index,
                "text": text,
                "ranking": [r.to_dict() for r in ranking],
            },
        )
        return slot.current_ranking

    def select_gui(self, state: SessionState, slot_index: int, gui_id: str) -> None:
        slot = self._guarded_slot(state, slot_index, "select_gui")
        if gui_id not in {r.gui_id for r in slot.current_ranking}:
            raise SelectionError(f"gui '{gui_id}' is not in the current ranking")
        self._record(state, "gui_selected", {"slot": slot_index, "gui_id": gui_id})

    def submit_feature_query(
        self, state: SessionState, slot_index: int, text: str
    ) -> tuple[FeatureQuery, list[AspectGui]]:
        slot = self._guarded_slot(state, slot_index, "submit_feature_query")
        if not text.strip():
            raise QueryError("feature query is empty")
        if not slot.current_ranking:
            raise StateConflictError(
                "submit_feature_query", slot.phase.value, "no ranking context"
            )
        for feat in slot.features:
            if (
                feat.status != FeatureStatus.REJECTED
                and feat.text.casefold() == text.strip().casefold()
            ):
                raise QueryError(f"feature '{text.strip()}' is already specified")
        feature = FeatureQuery(
            feature_id=f"f{state.feature_counter + 1}",
            text=text.strip(),
            origin=FeatureOrigin.CUSTOMER,
        )
        aspects = rank_aspect_guis(
            feature,
            slot.current_ranking,
            self.index,
            self.embedder,
            self.config.k_aspect,
        )
        self._record(
            state,
            "feature_query_submitted",
            {
                "slot": slot_index,
                "feature": feature.to_dict(),
                "aspect_ranking": [a.to_dict() for a in aspects],
            },
        )
        recorded = slot.find_feature(feature.feature_id)
        assert recorded is not None
        return recorded, slot.open_aspect_rankings[feature.feature_id]

    def _rerank_with(
        self, slot: GuiSlot, extra_feature: FeatureQuery
    ) -> list[RankedGui]:
        confirmed = slot.confirmed_features() + [extra_feature]
        return rerank(
            slot.nlr_gui,
            slot.current_ranking,
            confirmed,
            self.config.ranking_config(),
            self.index,
            self.embedder,
            self.cache,
        )

    def select_aspect_gui(
        self,
        state: SessionState,
        slot_index: int,
        feature_id: str,
        aspect: AspectGui | None = None,
        keep_text_only: bool = False,
    ) -> None:
        """Decide an open feature: confirm with an aspect, keep as text, or reject.

        Confirming with an aspect triggers a rerank of the current ranking
        over all confirmed features.
        """
        slot = self._guarded_slot(state, slot_index, "select_aspect_gui")
        feature = slot.find_feature(feature_id)
        if feature is None:
            raise NotFoundError(f"unknown feature '{feature_id}'")
        if feature.status != FeatureStatus.OPEN:
            raise StateConflictError(
                "select_aspect_gui", slot.phase.value, "feature already decided"
            )
        payload: dict = {"slot": slot_index, "feature_id": feature_id}
        if aspect is not None:
            shown = slot.open_aspect_rankings.get(feature_id, [])
            if not any(
                a.gui_id == aspect.gui_id and a.component_id == aspect.component_id
                for a in shown
            ):
                raise SelectionError(
                    "aspect does not belong to the last aspect ranking for this feature"
                )
            payload["decision"] = AspectDecision.SELECT_ASPECT.value
            payload["aspect"] = aspect.to_dict()
            payload["reranked"] = [r.to_dict() for r in self._rerank_with(slot, feature)]
        elif keep_text_only:
            payload["decision"] = AspectDecision.TEXT_ONLY.value
        else:
            payload["decision"] = AspectDecision.REJECT.value
        self._record(state, "aspect_decided", payload)

    def request_recommendations(
        self, state: SessionState, slot_index: int
    ) -> list[FeatureRecommendation]:
        slot = self._guarded_slot(state, slot_index, "request_recommendations")
        if slot.selected_gui is None:
            raise StateConflictError(
                "request_recommendations", slot.phase.value, "no GUI selected"
            )
        selected = self.index.get(slot.selected_gui)
        if selected is None:
            raise NotFoundError(f"selected gui '{slot.selected_gui}' not in corpus")
        generation = slot.recommendation_generation + 1
        recommendations = recommend_features(
            RecommendationRequest(
                nlr_gui=slot.nlr_gui,
                features=list(slot.features),
                selected=selected,
                ranked=list(slot.current_ranking),
                few_shot=self.few_shot,
            ),
            self.llm_provider,
            self.index,
            self.embedder,
            max_features=self.config.max_features,
            k_aspect=self.config.k_aspect,
            id_prefix=f"rec{generation}-",
        )
        self._record(
            state,
            "recommendations_requested",
            {
                "slot": slot_index,
                "generation": generation,
                "recommendations": [r.to_dict() for r in recommendations],
            },
        )
        return slot.pending_recommendations

    def respond_to_recommendation(
        self,
        state: SessionState,
        slot_index: int,
        feature_id: str,
        decision: RecommendationDecision | str,
        aspect: AspectGui | None = None,
    ) -> None:
        slot = self._guarded_slot(state, slot_index, "respond_to_recommendation")
        decision = RecommendationDecision(decision)
        rec = next(
            (
                r
                for r in slot.pending_recommendations
                if r.feature.feature_id == feature_id
            ),
            None,
        )
        if rec is None:
            raise NotFoundError(f"unknown pending recommendation '{feature_id}'")
        payload: dict = {
            "slot": slot_index,
            "feature_id": feature_id,
            "decision": decision.value,
        }
        if decision == RecommendationDecision.SELECT_ASPECT:
            if aspect is None:
                raise SelectionError("select_aspect decision requires an aspect")
            if not any(
                a.gui_id == aspect.gui_id and a.component_id == aspect.component_id
                for a in rec.aspect_ranking
            ):
                raise SelectionError(
                    "aspect does not belong to this recommendation's aspect ranking"
                )
            payload["aspect"] = aspect.to_dict()
            payload["reranked"] = [
                r.to_dict() for r in self._rerank_with(slot, rec.feature)
            ]
        self._record(state, "recommendation_decided", payload)

    def complete_slot(self, state: SessionState, slot_index: int) -> SessionState:
        """Mark the active slot done and open the next empty slot."""
        slot = self._guarded_slot(state, slot_index, "complete_slot")
        if slot.selected_gui is None:
            raise StateConflictError(
                "complete_slot", slot.phase.value, "no GUI selected"
            )
        self._record(state, "slot_completed", {"slot": slot_index})
        self._record(state, "slot_opened", {"slot": len(state.slots)})
        return state

    def export_artifact(self, state: SessionState) -> PrototypeArtifact:
        return build_artifact(state)


def build_artifact(state: SessionState) -> PrototypeArtifact:
    """Build the requirements artifact over all completed slots.

    Deterministic for an unchanged session: the export timestamp is the
    timestamp of the session's last event, not the wall clock.
    """
    completed = state.completed_slots()
    if not completed:
        raise StateConflictError(
            "export_artifact", "empty", "session has no completed slots"
        )
    records = []
    for slot in completed:
        by_id = {f.feature_id: f for f in slot.features}
        aspect_records = tuple(
            AspectRecord(
                feature_text=by_id[fid].text,
                gui_id=aspect.gui_id,
                component_id=aspect.component_id,
                score=aspect.score,
                gui_score=aspect.gui_score,
            )
            for fid, aspect in slot.aspect_selections.items()
        )
        assert slot.selected_gui is not None
        records.append(
            SlotRecord(
                nlr_gui=slot.nlr_gui,
                selected_gui=slot.selected_gui,
                aspect_guis=aspect_records,
                textual_requirements=tuple(slot.unmatched_requirements),
            )
        )
    return PrototypeArtifact(
        app_name=state.app_name,
        slots=tuple(records),
        exported_at=state.updated_at,
        corpus_hash=state.config.corpus_hash,
        config=state.config,
    )
