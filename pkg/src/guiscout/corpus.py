"""GUI corpus: loading, validation, filtering, and text extraction.

A corpus on disk is a directory of ``<gui_id>.json`` files (one GUI per
file, schema documented in ``docs/schemas.md``), an optional
``screenshots/`` directory, and an optional ``corpus.manifest.json``
carrying counts and the schema version.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

from .errors import ConfigError, CorpusSourceError

SCHEMA_VERSION = 1

# Closed vocabulary of component types; unknown types are rejected at load.
COMPONENT_TYPES = frozenset({
    "CONTAINER",
    "TEXT",
    "BUTTON",
    "TEXT_INPUT",
    "IMAGE",
    "ICON",
    "CHECKBOX",
    "RADIO_BUTTON",
    "SWITCH",
    "SLIDER",
    "LIST",
    "LIST_ITEM",
    "CARD",
    "TOOLBAR",
    "NAVIGATION",
    "TAB",
    "DRAWER",
    "MODAL",
    "MAP",
    "WEB_VIEW",
    "VIDEO",
    "ADVERTISEMENT",
    "PAGER_INDICATOR",
    "DATE_PICKER",
    "NUMBER_STEPPER",
})

MAX_DESCRIPTIONS = 5

_CAMEL_BOUNDARY = re.compile(r"(?<=[a-z0-9])(?=[A-Z])")
_NON_ALNUM = re.compile(r"[^0-9A-Za-z]+")


@dataclass
class GuiComponent:
    """One node of a GUI view hierarchy."""

    component_id: str
    component_type: str
    displayed_text: str = ""
    resource_id: str = ""
    semantic_classes: list[str] = field(default_factory=list)
    bounds: tuple[int, int, int, int] = (0, 0, 0, 0)
    children: list["GuiComponent"] = field(default_factory=list)

    def iter_tree(self) -> Iterator["GuiComponent"]:
        """Yield this component and all descendants in document order."""
        yield self
        for child in self.children:
            yield from child.iter_tree()

    def is_leaf(self) -> bool:
        return not self.children

    def to_dict(self) -> dict:
        return {
            "component_id": self.component_id,
            "component_type": self.component_type,
            "displayed_text": self.displayed_text,
            "resource_id": self.resource_id,
            "semantic_classes": list(self.semantic_classes),
            "bounds": list(self.bounds),
            "children": [c.to_dict() for c in self.children],
        }


@dataclass
class GuiDocument:
    """One corpus GUI: component tree, crowd descriptions, metadata flags."""

    gui_id: str
    app_id: str
    root: GuiComponent
    s2w_descriptions: list[str] = field(default_factory=list)
    filter_flags: set[str] = field(default_factory=set)
    language_tag: str = "en"
    screenshot_ref: str | None = None

    def components(self) -> Iterator[GuiComponent]:
        return self.root.iter_tree()

    def component_count(self) -> int:
        return sum(1 for _ in self.components())

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "gui_id": self.gui_id,
            "app_id": self.app_id,
            "language_tag": self.language_tag,
            "screenshot": self.screenshot_ref,
            "filter_flags": sorted(self.filter_flags),
            "s2w_descriptions": list(self.s2w_descriptions),
            "root": self.root.to_dict(),
        }


@dataclass
class RecordError:
    """A per-record load failure: which file, which GUI, and why."""

    source: str
    gui_id: str | None
    reason: str


@dataclass
class CorpusIndex:
    """Immutable index over the loaded (and possibly filtered) corpus."""

    documents: dict[str, GuiDocument]
    count_total: int
    count_filtered: int = 0
    build_timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(),
        compare=False,
    )
    errors: list[RecordError] = field(default_factory=list, compare=False)

    def __post_init__(self):
        if self.count_total != self.count_filtered + len(self.documents):
            raise ValueError(
                "count_total must equal count_filtered + retained documents"
            )

    def get(self, gui_id: str) -> GuiDocument | None:
        return self.documents.get(gui_id)

    def __len__(self) -> int:
        return len(self.documents)

    def iter_sorted(self) -> Iterator[GuiDocument]:
        """Documents in ascending gui_id order, independent of insertion order."""
        for gui_id in sorted(self.documents):
            yield self.documents[gui_id]


@dataclass
class FilterRules:
    """Configuration for :func:`filter_corpus`.

    exclude_flags: drop documents carrying any of these filter_flags.
    min_components: drop documents with fewer components than this.
    language_tags: when set, keep only documents whose tag is in the set.
    """

    exclude_flags: frozenset[str] = frozenset()
    min_components: int | None = None
    language_tags: frozenset[str] | None = None

    _KNOWN_KEYS = ("exclude_flags", "min_components", "language_tags")

    @classmethod
    def from_dict(cls, raw: dict) -> "FilterRules":
        unknown = set(raw) - set(cls._KNOWN_KEYS)
        if unknown:
            raise ConfigError(f"unknown filter rule(s): {', '.join(sorted(unknown))}")
        min_components = raw.get("min_components")
        if min_components is not None and (
            not isinstance(min_components, int) or min_components < 0
        ):
            raise ConfigError("min_components must be a non-negative integer")
        tags = raw.get("language_tags")
        return cls(
            exclude_flags=frozenset(raw.get("exclude_flags", ())),
            min_components=min_components,
            language_tags=frozenset(tags) if tags is not None else None,
        )

    def is_empty(self) -> bool:
        return (
            not self.exclude_flags
            and self.min_components is None
            and self.language_tags is None
        )


@dataclass
class FilterReport:
    """Accounts for every document removed by :func:`filter_corpus`."""

    per_filter_counts: dict[str, int] = field(default_factory=dict)
    removed: list[tuple[str, list[str]]] = field(default_factory=list)

    @property
    def removed_count(self) -> int:
        return len(self.removed)


def _parse_component(raw: dict, path: str, seen_ids: set[str]) -> GuiComponent:
    for key in ("component_id", "component_type"):
        if key not in raw:
            raise ValueError(f"component missing '{key}'")
    cid = raw["component_id"]
    if not isinstance(cid, str) or not cid:
        raise ValueError("component_id must be a nonempty string")
    if cid in seen_ids:
        raise ValueError(f"duplicate component_id '{cid}'")
    seen_ids.add(cid)
    ctype = raw["component_type"]
    if ctype not in COMPONENT_TYPES:
        raise ValueError(f"unknown component_type '{ctype}'")
    bounds = raw.get("bounds", [0, 0, 0, 0])
    if (
        not isinstance(bounds, (list, tuple))
        or len(bounds) != 4
        or not all(isinstance(v, int) for v in bounds)
    ):
        raise ValueError(f"component '{cid}': bounds must be four integers")
    left, top, right, bottom = bounds
    if left > right or top > bottom:
        raise ValueError(f"component '{cid}': bounds must satisfy left<=right, top<=bottom")
    classes = raw.get("semantic_classes", [])
    if not isinstance(classes, list) or not all(isinstance(s, str) for s in classes):
        raise ValueError(f"component '{cid}': semantic_classes must be a list of strings")
    children = raw.get("children", [])
    if not isinstance(children, list):
        raise ValueError(f"component '{cid}': children must be a list")
    return GuiComponent(
        component_id=cid,
        component_type=ctype,
        displayed_text=str(raw.get("displayed_text", "")),
        resource_id=str(raw.get("resource_id", "")),
        semantic_classes=list(classes),
        bounds=(left, top, right, bottom),
        children=[_parse_component(c, path, seen_ids) for c in children],
    )


def parse_document(raw: dict, source: str = "<memory>") -> GuiDocument:
    """Parse one GUI record; raises ValueError with a reason on any schema breach."""
    gui_id = raw.get("gui_id")
    if not isinstance(gui_id, str) or not gui_id:
        raise ValueError("missing gui_id")
    app_id = raw.get("app_id", "")
    descriptions = raw.get("s2w_descriptions", [])
    if not isinstance(descriptions, list) or not all(
        isinstance(d, str) for d in descriptions
    ):
        raise ValueError("s2w_descriptions must be a list of strings")
    if len(descriptions) > MAX_DESCRIPTIONS:
        raise ValueError(f"at most {MAX_DESCRIPTIONS} s2w_descriptions allowed")
    flags = raw.get("filter_flags", [])
    if not isinstance(flags, list) or not all(isinstance(f, str) for f in flags):
        raise ValueError("filter_flags must be a list of strings")
    if "root" not in raw or not isinstance(raw["root"], dict):
        raise ValueError("missing root component")
    root = _parse_component(raw["root"], source, set())
    return GuiDocument(
        gui_id=gui_id,
        app_id=str(app_id),
        root=root,
        s2w_descriptions=list(descriptions),
        filter_flags=set(flags),
        language_tag=str(raw.get("language_tag", "en")),
        screenshot_ref=raw.get("screenshot"),
    )


def load_corpus(source: str | Path) -> CorpusIndex:
    """Load all ``*.json`` GUI records under ``source``.

    Syntactically valid documents are indexed; invalid records are collected
    in ``CorpusIndex.errors`` with the offending file named, never silently
    dropped. An unreadable source is fatal.
    """
    root = Path(source)
    if not root.is_dir():
        raise CorpusSourceError(f"corpus source '{root}' is not a readable directory")
    documents: dict[str, GuiDocument] = {}
    errors: list[RecordError] = []
    for path in sorted(root.glob("*.json")):
        if path.name == "corpus.manifest.json":
            _check_manifest(path)
            continue
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            errors.append(RecordError(str(path), None, f"unparseable JSON: {exc}"))
            continue
        try:
            doc = parse_document(raw, str(path))
        except ValueError as exc:
            errors.append(RecordError(str(path), raw.get("gui_id"), str(exc)))
            continue
        if doc.gui_id in documents:
            errors.append(
                RecordError(str(path), doc.gui_id, "duplicate gui_id in corpus")
            )
            continue
        documents[doc.gui_id] = doc
    return CorpusIndex(documents=documents, count_total=len(documents), errors=errors)


def _check_manifest(path: Path) -> None:
    try:
        manifest = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CorpusSourceError(f"unreadable corpus manifest: {exc}") from exc
    version = manifest.get("schema_version")
    if version != SCHEMA_VERSION:
        raise CorpusSourceError(
            f"unsupported corpus schema_version {version!r} (expected {SCHEMA_VERSION})"
        )


def write_corpus(directory: str | Path, documents: list[GuiDocument]) -> None:
    """Serialize documents as one JSON file per GUI plus a manifest."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    for doc in documents:
        path = root / f"{doc.gui_id}.json"
        path.write_text(
            json.dumps(doc.to_dict(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    manifest = {"schema_version": SCHEMA_VERSION, "gui_count": len(documents)}
    (root / "corpus.manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )


def filter_corpus(
    index: CorpusIndex, rules: FilterRules
) -> tuple[CorpusIndex, FilterReport]:
    """Drop documents matching the exclusion rules; account for every removal.

    A document may trip several filters at once; each tripped filter counts
    in ``per_filter_counts``, so their sum can exceed the removal count.
    """
    report = FilterReport()
    surviving: dict[str, GuiDocument] = {}
    for gui_id in sorted(index.documents):
        doc = index.documents[gui_id]
        reasons: list[str] = []
        for flag in sorted(doc.filter_flags & rules.exclude_flags):
            reasons.append(f"flag:{flag}")
        if (
            rules.min_components is not None
            and doc.component_count() < rules.min_components
        ):
            reasons.append(f"min_components:{rules.min_components}")
        if (
            rules.language_tags is not None
            and doc.language_tag not in rules.language_tags
        ):
            reasons.append(f"language:{doc.language_tag}")
        if reasons:
            report.removed.append((gui_id, reasons))
            for reason in reasons:
                key = reason if reason.startswith("flag:") else reason.split(":", 1)[0]
                report.per_filter_counts[key] = (
                    report.per_filter_counts.get(key, 0) + 1
                )
        else:
            surviving[gui_id] = doc
    filtered_index = CorpusIndex(
        documents=surviving,
        count_total=index.count_total,
        count_filtered=index.count_filtered + len(report.removed),
    )
    return filtered_index, report


def split_identifier(identifier: str) -> str:
    """Tokenize a resource identifier into lowercase space-joined words.

    Splits on underscores, hyphens, any other non-alphanumeric characters,
    and lower-to-upper camel-case boundaries. ``"searchBarInput"`` becomes
    ``"search bar input"``.
    """
    parts = _NON_ALNUM.split(identifier)
    words: list[str] = []
    for part in parts:
        if not part:
            continue
        words.extend(w for w in _CAMEL_BOUNDARY.split(part) if w)
    return " ".join(w.lower() for w in words)


def component_text_candidates(component: GuiComponent) -> list[str]:
    """Candidate texts for matching a component against a feature query.

    Candidates, in order: the displayed text verbatim, the split resource
    id, then each semantic class label. Empty candidates are omitted.
    """
    candidates: list[str] = []
    if component.displayed_text.strip():
        candidates.append(component.displayed_text)
    if component.resource_id:
        split = split_identifier(component.resource_id)
        if split:
            candidates.append(split)
    for label in component.semantic_classes:
        if label.strip():
            candidates.append(label)
    return candidates


def _render_component(c: GuiComponent) -> str:
    return f'"{c.displayed_text}" ({c.component_type}) ({c.resource_id})'


def flatten_hierarchy_for_prompt(document: GuiDocument) -> str:
    """Render the component tree as a deterministic two-level list.

    Each leaf appears exactly once as ``- "text" (TYPE) (resource_id)``,
    indented under a header line for its nearest CONTAINER-type ancestor;
    leaves without one go under an implicit ``(ungrouped)`` header. Groups
    appear in order of their first leaf in document order.
    """
    groups: dict[str | None, list[GuiComponent]] = {}
    order: list[str | None] = []
    headers: dict[str, GuiComponent] = {}

    def walk(component: GuiComponent, container: GuiComponent | None) -> None:
        if component.is_leaf():
            key = container.component_id if container is not None else None
            if key not in groups:
                groups[key] = []
                order.append(key)
                if container is not None:
                    headers[key] = container
            groups[key].append(component)
            return
        next_container = (
            component if component.component_type == "CONTAINER" else container
        )
        for child in component.children:
            walk(child, next_container)

    walk(document.root, None)

    lines: list[str] = []
    for key in order:
        if key is None:
            lines.append("(ungrouped)")
        else:
            lines.append(_render_component(headers[key]))
        for leaf in groups[key]:
            lines.append(f"  - {_render_component(leaf)}")
    return "\n".join(lines)


def gui_full_text(document: GuiDocument) -> str:
    """Space-joined concatenation of all component text candidates, document order."""
    parts: list[str] = []
    for component in document.components():
        parts.extend(component_text_candidates(component))
    return " ".join(parts)
