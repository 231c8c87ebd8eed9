"""Feature recommendation via a pluggable LLM provider.

The provider receives a few-shot prompt assembled from the session context
(initial requirements, already specified features, and the selected GUI
flattened to a two-level component list) and must answer with a JSON array
of feature strings. Parsed features are scored by their coverage among the
current top-k GUIs and returned sorted, each with an explanation and its
own aspect-GUI ranking.

The scripted provider replays canned responses from a JSON file keyed by
prompt substrings, which makes the whole pipeline deterministic in tests
and demos.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import requests

from .corpus import CorpusIndex, GuiDocument, flatten_hierarchy_for_prompt
from .embedding import Embedder
from .errors import ConfigError, ProviderFormatError, ProviderTransportError
from .feature_match import (
    DEFAULT_K_ASPECT,
    AspectGui,
    FeatureOrigin,
    FeatureQuery,
    rank_aspect_guis,
    score_feature_gui,
)
from .ranking import RankedGui

logger = logging.getLogger(__name__)

DEFAULT_MAX_FEATURES = 30

FEATURE_TASK_INSTRUCTIONS = (
    "You are assisting a customer who is prototyping a mobile app screen.\n"
    "Recommend the top-{max_features} GUI features that this screen should"
    " offer, given the requirements and the selected screen below. Respond"
    " with a JSON array of short feature descriptions (strings), ordered"
    " from most to least relevant. Return only the JSON array."
)

EXPLANATION_TASK_INSTRUCTIONS = (
    "Explain the feature below in one or two sentences: say what it does"
    " for the user in the context of the described app screen. Respond with"
    " the explanation text only."
)

# Repo-authored default exemplars; replaceable via a JSON file of
# {"context": ..., "output": ...} pairs.
DEFAULT_FEW_SHOT: tuple[tuple[str, str], ...] = (
    (
        "Requirements: a screen to log into the app\n"
        'Selected GUI:\n"Login" (CONTAINER) (login_panel)\n'
        '  - "Email" (TEXT_INPUT) (email_field)\n'
        '  - "Password" (TEXT_INPUT) (password_field)\n'
        '  - "Sign in" (BUTTON) (btn_sign_in)',
        '["forgot password link", "sign up button", "show password toggle",'
        ' "remember me checkbox", "social login buttons"]',
    ),
    (
        "Requirements: browse news articles by category\n"
        'Selected GUI:\n"Headlines" (CONTAINER) (headline_list)\n'
        '  - "Top stories" (TEXT) (section_title)\n'
        '  - "" (IMAGE) (article_thumbnail)\n'
        '  - "Read more" (BUTTON) (btn_read_more)',
        '["search bar", "category tabs", "bookmark button",'
        ' "share button", "refresh control"]',
    ),
)


@dataclass(frozen=True)
class PromptBundle:
    """A fully rendered prompt plus the fields it was assembled from."""

    task_instructions: str
    nlr_gui: str
    specified_features: tuple[str, ...]
    flattened_gui: str
    few_shot_examples: tuple[tuple[str, str], ...]
    rendered: str


class LlmProvider(Protocol):
    def complete(self, prompt: str) -> str: ...


class LlmProviderKind(str, Enum):
    SCRIPTED = "scripted"
    REMOTE_HTTP = "remote_http"


@dataclass(frozen=True)
class LlmProviderConfig:
    provider_kind: LlmProviderKind = LlmProviderKind.SCRIPTED
    script_path: str | None = None
    endpoint: str | None = None
    max_features: int = DEFAULT_MAX_FEATURES

    def __post_init__(self):
        if self.provider_kind == LlmProviderKind.SCRIPTED and not self.script_path:
            raise ConfigError("scripted provider requires script_path")
        if self.provider_kind == LlmProviderKind.REMOTE_HTTP and not self.endpoint:
            raise ConfigError("remote_http provider requires an endpoint")


class ScriptMiss(ProviderFormatError):
    """No script entry matched the prompt and the script has no default."""


class ScriptedLlmProvider:
    """Deterministic provider replaying canned responses.

    The script file is JSON: ``{"version": 1, "responses": [{"match": str,
    "text": str}, ...], "default": str?}``. The first entry whose ``match``
    string occurs verbatim in the prompt wins; otherwise ``default`` is
    returned when present.
    """

    def __init__(self, script_path: str | Path):
        raw = json.loads(Path(script_path).read_text(encoding="utf-8"))
        if raw.get("version") != 1:
            raise ConfigError(f"unsupported script version {raw.get('version')!r}")
        self._responses: list[tuple[str, str]] = [
            (entry["match"], entry["text"]) for entry in raw.get("responses", [])
        ]
        self._default: str | None = raw.get("default")

    def complete(self, prompt: str) -> str:
        for match, text in self._responses:
            if match in prompt:
                return text
        if self._default is not None:
            return self._default
        raise ScriptMiss("no script entry matches the prompt", raw=prompt[:500])


class RemoteHttpLlmProvider:
    """Provider speaking the documented HTTP contract.

    POST ``{"prompt": ..., "max_tokens": n}``; expects ``{"text": ...}``.
    """

    def __init__(self, endpoint: str, max_tokens: int = 2048, timeout: float = 60.0, session=None):
        self.endpoint = endpoint
        self.max_tokens = max_tokens
        self.timeout = timeout
        self._session = session or requests.Session()

    def complete(self, prompt: str) -> str:
        try:
            response = self._session.post(
                self.endpoint,
                json={"prompt": prompt, "max_tokens": self.max_tokens},
                timeout=self.timeout,
            )
            response.raise_for_status()
            payload = response.json()
        except requests.RequestException as exc:
            raise ProviderTransportError(f"LLM endpoint failed: {exc}") from exc
        except ValueError as exc:
            raise ProviderFormatError(f"LLM endpoint returned non-JSON: {exc}") from exc
        if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
            raise ProviderFormatError(
                "LLM endpoint must return {\"text\": ...}", raw=str(payload)[:2000]
            )
        return payload["text"]


def create_llm_provider(config: LlmProviderConfig) -> LlmProvider:
    if config.provider_kind == LlmProviderKind.SCRIPTED:
        return ScriptedLlmProvider(config.script_path or "")
    return RemoteHttpLlmProvider(endpoint=config.endpoint or "")


def load_few_shot_examples(path: str | Path) -> tuple[tuple[str, str], ...]:
    """Load exemplars from a JSON file of {"context", "output"} objects."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return tuple((entry["context"], entry["output"]) for entry in raw)


def _render_few_shot(examples: Sequence[tuple[str, str]]) -> str:
    blocks = []
    for i, (context, output) in enumerate(examples, start=1):
        blocks.append(f"### Example {i}\n{context}\nOutput: {output}")
    return "\n\n".join(blocks)


def build_recommendation_prompt(
    nlr_gui: str,
    features: Sequence[FeatureQuery],
    selected: GuiDocument,
    examples: Sequence[tuple[str, str]] = DEFAULT_FEW_SHOT,
    max_features: int = DEFAULT_MAX_FEATURES,
) -> PromptBundle:
    """Assemble the feature recommendation prompt.

    Section order: task instructions, then the initial requirements, then
    the selected GUI as a two-level component list, then the already
    specified features, then the few-shot exemplars. Pure function of its
    inputs.
    """
    instructions = FEATURE_TASK_INSTRUCTIONS.format(max_features=max_features)
    flattened = flatten_hierarchy_for_prompt(selected)
    feature_texts = tuple(f.text for f in features)
    feature_block = "\n".join(f"- {text}" for text in feature_texts) or "(none)"
    rendered = (
        f"## Task\n{instructions}\n\n"
        f"## Initial requirements\n{nlr_gui}\n\n"
        f"## Selected GUI\n{flattened}\n\n"
        f"## Already specified features\n{feature_block}\n\n"
        f"## Examples\n{_render_few_shot(examples)}\n"
    )
    return PromptBundle(
        task_instructions=instructions,
        nlr_gui=nlr_gui,
        specified_features=feature_texts,
        flattened_gui=flattened,
        few_shot_examples=tuple(examples),
        rendered=rendered,
    )


def build_explanation_prompt(
    feat: FeatureQuery,
    nlr_gui: str,
    examples: Sequence[tuple[str, str]] = (),
) -> PromptBundle:
    """Assemble the prompt asking for a short feature explanation."""
    example_block = f"\n## Examples\n{_render_few_shot(examples)}\n" if examples else ""
    rendered = (
        f"## Task\n{EXPLANATION_TASK_INSTRUCTIONS}\n\n"
        f"## App screen requirements\n{nlr_gui}\n\n"
        f'## Feature\nFeature: "{feat.text}"\n'
        f"{example_block}"
    )
    return PromptBundle(
        task_instructions=EXPLANATION_TASK_INSTRUCTIONS,
        nlr_gui=nlr_gui,
        specified_features=(),
        flattened_gui="",
        few_shot_examples=tuple(examples),
        rendered=rendered,
    )


def parse_feature_list(
    raw: str, max_features: int = DEFAULT_MAX_FEATURES, id_prefix: str = "pf"
) -> list[FeatureQuery]:
    """Parse the provider's JSON array of feature strings.

    Whitespace is trimmed, blank entries dropped, duplicates removed
    case-insensitively (first occurrence wins), and the list truncated to
    ``max_features``. Anything that is not a JSON array of strings is a
    provider-format error carrying the raw text.
    """
    try:
        parsed = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProviderFormatError(f"feature list is not JSON: {exc}", raw=raw) from exc
    if not isinstance(parsed, list) or not all(isinstance(x, str) for x in parsed):
        raise ProviderFormatError("feature list must be a JSON array of strings", raw=raw)
    features: list[FeatureQuery] = []
    seen: set[str] = set()
    for text in parsed:
        text = text.strip()
        if not text or text.casefold() in seen:
            continue
        seen.add(text.casefold())
        features.append(
            FeatureQuery(
                feature_id=f"{id_prefix}{len(features) + 1}",
                text=text,
                origin=FeatureOrigin.RECOMMENDED,
            )
        )
        if len(features) >= max_features:
            break
    return features


def score_predicted_feature(
    feat: FeatureQuery,
    ranked: Sequence[RankedGui],
    index: CorpusIndex,
    embedder: Embedder,
) -> float:
    """Coverage of a predicted feature among the top-k GUIs: mean best-component score."""
    if not ranked:
        raise ValueError("cannot score a feature over an empty ranking")
    total = 0.0
    for entry in ranked:
        gui = index.get(entry.gui_id)
        if gui is None:
            raise ValueError(f"ranked gui_id '{entry.gui_id}' not in corpus index")
        score, _ = score_feature_gui(feat, gui, embedder)
        total += score
    return total / len(ranked)


@dataclass(frozen=True)
class FeatureRecommendation:
    """A predicted feature with its explanation, coverage score, and aspects."""

    feature: FeatureQuery
    explanation: str
    coverage_score: float
    aspect_ranking: tuple[AspectGui, ...]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.to_dict(),
            "explanation": self.explanation,
            "coverage_score": self.coverage_score,
            "aspect_ranking": [a.to_dict() for a in self.aspect_ranking],
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "FeatureRecommendation":
        return cls(
            feature=FeatureQuery.from_dict(raw["feature"]),
            explanation=raw["explanation"],
            coverage_score=raw["coverage_score"],
            aspect_ranking=tuple(AspectGui.from_dict(a) for a in raw["aspect_ranking"]),
        )


@dataclass
class RecommendationRequest:
    """Session context handed to the recommendation pipeline."""

    nlr_gui: str
    features: list[FeatureQuery] = field(default_factory=list)
    selected: GuiDocument | None = None
    ranked: list[RankedGui] = field(default_factory=list)
    few_shot: Sequence[tuple[str, str]] = DEFAULT_FEW_SHOT


def recommend_features(
    request: RecommendationRequest,
    provider: LlmProvider,
    index: CorpusIndex,
    embedder: Embedder,
    max_features: int = DEFAULT_MAX_FEATURES,
    k_aspect: int = DEFAULT_K_ASPECT,
    id_prefix: str = "rec-",
) -> list[FeatureRecommendation]:
    """Run the full recommendation pipeline for one session snapshot.

    Predicted features textually equal (case-insensitive) to a feature
    already recorded for the slot are filtered out. Results are sorted by
    descending coverage score; ties keep the provider's own order. A
    missing script entry for an explanation degrades to an empty string
    with a warning, never a failure.
    """
    if request.selected is None:
        raise ValueError("recommendation requires a selected GUI")
    if not request.ranked:
        raise ValueError("recommendation requires a current top-k ranking")
    prompt = build_recommendation_prompt(
        request.nlr_gui,
        request.features,
        request.selected,
        examples=request.few_shot,
        max_features=max_features,
    )
    raw = provider.complete(prompt.rendered)
    predicted = parse_feature_list(raw, max_features=max_features, id_prefix=id_prefix)
    known = {f.text.casefold() for f in request.features}
    predicted = [f for f in predicted if f.text.casefold() not in known]

    recommendations: list[FeatureRecommendation] = []
    for feat in predicted:
        coverage = score_predicted_feature(feat, request.ranked, index, embedder)
        aspects = rank_aspect_guis(feat, request.ranked, index, embedder, k_aspect)
        explanation_prompt = build_explanation_prompt(feat, request.nlr_gui)
        try:
            explanation = provider.complete(explanation_prompt.rendered).strip()
        except ScriptMiss:
            logger.warning("no scripted explanation for feature %r", feat.text)
            explanation = ""
        recommendations.append(
            FeatureRecommendation(
                feature=feat,
                explanation=explanation,
                coverage_score=coverage,
                aspect_ranking=tuple(aspects),
            )
        )
    recommendations.sort(key=lambda r: -r.coverage_score)
    return recommendations
