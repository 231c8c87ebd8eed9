"""Match feature requirements against individual GUI components.

A feature is matched to single components only, never to component groups.
A component's score is the best cosine over its candidate texts; a GUI's
score is the best component score in its tree, together with which
component achieved it (the aspect). All components with any text candidate
participate, containers included.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Mapping, Sequence

from .corpus import CorpusIndex, GuiComponent, GuiDocument, component_text_candidates
from .embedding import Embedder, EmbeddingVector, cosine

if TYPE_CHECKING:
    from .ranking import RankedGui

DEFAULT_K_ASPECT = 15


class FeatureOrigin(str, Enum):
    CUSTOMER = "customer"
    RECOMMENDED = "recommended"


class FeatureStatus(str, Enum):
    OPEN = "open"
    CONFIRMED_WITH_ASPECT = "confirmed_with_aspect"
    CONFIRMED_TEXT_ONLY = "confirmed_text_only"
    REJECTED = "rejected"


CONFIRMED_STATUSES = frozenset(
    {FeatureStatus.CONFIRMED_WITH_ASPECT, FeatureStatus.CONFIRMED_TEXT_ONLY}
)


@dataclass
class FeatureQuery:
    """A natural-language requirement for one GUI feature."""

    feature_id: str
    text: str
    origin: FeatureOrigin = FeatureOrigin.CUSTOMER
    status: FeatureStatus = FeatureStatus.OPEN

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise ValueError("feature text must be nonempty")
        if isinstance(self.origin, str):
            self.origin = FeatureOrigin(self.origin)
        if isinstance(self.status, str):
            self.status = FeatureStatus(self.status)

    def transition(self, new_status: FeatureStatus) -> None:
        """Move out of OPEN; any other transition is a contract breach."""
        if self.status != FeatureStatus.OPEN:
            raise ValueError(
                f"feature '{self.feature_id}' already decided ({self.status.value})"
            )
        if new_status == FeatureStatus.OPEN:
            raise ValueError("cannot transition back to open")
        self.status = new_status

    def to_dict(self) -> dict:
        return {
            "feature_id": self.feature_id,
            "text": self.text,
            "origin": self.origin.value,
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "FeatureQuery":
        return cls(
            feature_id=raw["feature_id"],
            text=raw["text"],
            origin=FeatureOrigin(raw["origin"]),
            status=FeatureStatus(raw["status"]),
        )


@dataclass(frozen=True)
class AspectGui:
    """A GUI paired with its best-matching component for one feature.

    ``score`` is the matched component's own score; ``gui_score`` is the
    containing GUI's best-component score. They are equal whenever the
    referenced component is the argmax, which holds for every AspectGui
    this module produces.
    """

    gui_id: str
    component_id: str | None
    score: float
    gui_score: float

    def to_dict(self) -> dict:
        return {
            "gui_id": self.gui_id,
            "component_id": self.component_id,
            "score": self.score,
            "gui_score": self.gui_score,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "AspectGui":
        return cls(
            gui_id=raw["gui_id"],
            component_id=raw["component_id"],
            score=raw["score"],
            gui_score=raw["gui_score"],
        )


def _component_score(feature_vec: EmbeddingVector, component: GuiComponent, embedder: Embedder) -> float:
    best = 0.0
    for candidate in component_text_candidates(component):
        best = max(best, cosine(feature_vec, embedder.embed_text(candidate)))
    return best


def score_feature_component(
    feat: FeatureQuery, component: GuiComponent, embedder: Embedder
) -> float:
    """Best cosine between the feature text and the component's candidate texts.

    A component without any candidate text scores 0.
    """
    return _component_score(embedder.embed_text(feat.text), component, embedder)


def score_feature_gui(
    feat: FeatureQuery, gui: GuiDocument, embedder: Embedder
) -> tuple[float, str | None]:
    """Best component score across the whole tree, with the argmax component id.

    Ties go to the first component in document order.
    """
    feature_vec = embedder.embed_text(feat.text)
    best_score = 0.0
    best_id: str | None = None
    for component in gui.components():
        score = _component_score(feature_vec, component, embedder)
        if best_id is None or score > best_score:
            best_score = score
            best_id = component.component_id
    return best_score, best_id


def rank_aspect_guis(
    feat: FeatureQuery,
    ranked: Sequence["RankedGui"],
    index: CorpusIndex,
    embedder: Embedder,
    k_aspect: int = DEFAULT_K_ASPECT,
) -> list[AspectGui]:
    """One AspectGui per ranked GUI, ordered by gui_score, truncated to k_aspect.

    Only GUIs in the current top-k ranking participate. Ties are broken by
    ascending gui_id; input order does not matter.
    """
    aspects: list[AspectGui] = []
    for entry in ranked:
        gui = index.get(entry.gui_id)
        if gui is None:
            raise ValueError(f"ranked gui_id '{entry.gui_id}' not in corpus index")
        gui_score, component_id = score_feature_gui(feat, gui, embedder)
        aspects.append(
            AspectGui(
                gui_id=entry.gui_id,
                component_id=component_id,
                score=gui_score,
                gui_score=gui_score,
            )
        )
    aspects.sort(key=lambda a: (-a.gui_score, a.gui_id))
    return aspects[:k_aspect]
