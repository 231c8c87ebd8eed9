"""GUI ranking: per-GUI scores, the ensemble, top-k lists, and feedback reranking.

Scores:
  s1        cosine between the query embedding and the GUI's full-text embedding
  s2        mean cosine between the query and each available crowd description
  ensemble  alpha * s1 + (1 - alpha) * s2, falling back to s1 when s2 is absent
  rerank    beta * ensemble + (1 - beta) * mean confirmed-feature score

All orderings are deterministic: descending score, ties broken by ascending
gui_id.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Mapping, Sequence

from .corpus import CorpusIndex, GuiDocument, gui_full_text
from .embedding import (
    KIND_DESCRIPTION,
    KIND_FULL_TEXT,
    Embedder,
    EmbeddingCache,
    EmbeddingVector,
    cosine,
)
from .errors import ConfigError, QueryError

if TYPE_CHECKING:
    from .feature_match import FeatureQuery


@dataclass(frozen=True)
class RankingConfig:
    """Knobs for the ensemble and the feedback rerank.

    alpha weights the GUI-text score within the ensemble; beta weights the
    original query score within the rerank blend; top_k bounds the ranking.
    """

    alpha: float = 0.5
    beta: float = 0.5
    top_k: int = 30

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ConfigError(f"beta must be in [0, 1], got {self.beta}")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be positive, got {self.top_k}")


@dataclass(frozen=True)
class RankedGui:
    """One ranking entry with its per-model subscores."""

    gui_id: str
    s1: float
    s2: float | None
    ensemble: float
    rank: int
    rerank_score: float | None = None

    def to_dict(self) -> dict:
        return {
            "gui_id": self.gui_id,
            "s1": self.s1,
            "s2": self.s2,
            "ensemble": self.ensemble,
            "rank": self.rank,
            "rerank_score": self.rerank_score,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "RankedGui":
        return cls(
            gui_id=raw["gui_id"],
            s1=raw["s1"],
            s2=raw["s2"],
            ensemble=raw["ensemble"],
            rank=raw["rank"],
            rerank_score=raw.get("rerank_score"),
        )


def _gui_text_vector(
    gui: GuiDocument, embedder: Embedder, cache: EmbeddingCache | None
) -> EmbeddingVector:
    if cache is not None:
        vec = cache.get(gui.gui_id, KIND_FULL_TEXT, 0)
        if vec is not None:
            return vec
    return embedder.embed_text(gui_full_text(gui))


def _description_vector(
    gui: GuiDocument, i: int, embedder: Embedder, cache: EmbeddingCache | None
) -> EmbeddingVector:
    if cache is not None:
        vec = cache.get(gui.gui_id, KIND_DESCRIPTION, i)
        if vec is not None:
            return vec
    return embedder.embed_text(gui.s2w_descriptions[i])


def score_s1(
    query: str,
    gui: GuiDocument,
    embedder: Embedder,
    cache: EmbeddingCache | None = None,
) -> float:
    """Cosine between the query and the GUI's extracted full text."""
    return _score_s1(embedder.embed_text(query), gui, embedder, cache)


def _score_s1(query_vec, gui, embedder, cache) -> float:
    return cosine(query_vec, _gui_text_vector(gui, embedder, cache))


def score_s2(
    query: str,
    gui: GuiDocument,
    embedder: Embedder,
    cache: EmbeddingCache | None = None,
) -> float | None:
    """Mean cosine against the available crowd descriptions; None when there are none.

    The denominator is the number of available descriptions, so GUIs with
    fewer than five descriptions are not penalized.
    """
    return _score_s2(embedder.embed_text(query), gui, embedder, cache)


def _score_s2(query_vec, gui, embedder, cache) -> float | None:
    n = len(gui.s2w_descriptions)
    if n == 0:
        return None
    total = 0.0
    for i in range(n):
        total += cosine(query_vec, _description_vector(gui, i, embedder, cache))
    return total / n


def ensemble_score(
    query: str,
    gui: GuiDocument,
    cfg: RankingConfig,
    embedder: Embedder,
    cache: EmbeddingCache | None = None,
) -> float:
    """Convex combination of s1 and s2; s1 alone when s2 is absent."""
    query_vec = embedder.embed_text(query)
    s1 = _score_s1(query_vec, gui, embedder, cache)
    s2 = _score_s2(query_vec, gui, embedder, cache)
    return _combine(s1, s2, cfg.alpha)


def _combine(s1: float, s2: float | None, alpha: float) -> float:
    if s2 is None:
        return s1
    return alpha * s1 + (1.0 - alpha) * s2


def ranking_order(scores: Mapping[str, float]) -> list[str]:
    """Order gui_ids by descending score, ties broken by ascending gui_id."""
    return sorted(scores, key=lambda gid: (-scores[gid], gid))


def rank_guis(
    query: str,
    index: CorpusIndex,
    cfg: RankingConfig,
    embedder: Embedder,
    cache: EmbeddingCache | None = None,
) -> list[RankedGui]:
    """Score every GUI in the index and return the top-k ranking.

    Raises QueryError for a query that is empty after stripping whitespace,
    so the dialogue layer can re-prompt.
    """
    if not query.strip():
        raise QueryError("query is empty")
    query_vec = embedder.embed_text(query)
    scored: dict[str, tuple[float, float | None, float]] = {}
    for gui in index.iter_sorted():
        s1 = _score_s1(query_vec, gui, embedder, cache)
        s2 = _score_s2(query_vec, gui, embedder, cache)
        scored[gui.gui_id] = (s1, s2, _combine(s1, s2, cfg.alpha))
    order = ranking_order({gid: vals[2] for gid, vals in scored.items()})
    ranked: list[RankedGui] = []
    for rank, gui_id in enumerate(order[: cfg.top_k], start=1):
        s1, s2, ens = scored[gui_id]
        ranked.append(RankedGui(gui_id=gui_id, s1=s1, s2=s2, ensemble=ens, rank=rank))
    return ranked


def rerank(
    query: str,
    ranked: Sequence[RankedGui],
    confirmed: Sequence["FeatureQuery"],
    cfg: RankingConfig,
    index: CorpusIndex,
    embedder: Embedder,
    cache: EmbeddingCache | None = None,
) -> list[RankedGui]:
    """Reorder the current top-k by blending query score with feature coverage.

    rerank_score = beta * ensemble + (1 - beta) * mean over confirmed
    features of the GUI's best-component score for that feature. Only the
    previously ranked set participates; it is never re-expanded to the
    whole corpus.
    """
    from .feature_match import score_feature_gui

    if not confirmed:
        raise ValueError("rerank requires at least one confirmed feature")
    rescored: dict[str, float] = {}
    feature_means: dict[str, float] = {}
    for entry in ranked:
        gui = index.get(entry.gui_id)
        if gui is None:
            raise ValueError(f"ranked gui_id '{entry.gui_id}' not in corpus index")
        total = 0.0
        for feat in confirmed:
            score, _ = score_feature_gui(feat, gui, embedder)
            total += score
        mean_feature = total / len(confirmed)
        feature_means[entry.gui_id] = mean_feature
        rescored[entry.gui_id] = (
            cfg.beta * entry.ensemble + (1.0 - cfg.beta) * mean_feature
        )
    by_id = {entry.gui_id: entry for entry in ranked}
    order = ranking_order(rescored)
    return [
        replace(by_id[gui_id], rank=rank, rerank_score=rescored[gui_id])
        for rank, gui_id in enumerate(order, start=1)
    ]
