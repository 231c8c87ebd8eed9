"""Ranking quality metrics and the offline evaluation harness.

Relevance is binary. Unjudged items count as irrelevant, matching a
fixed-pool annotation protocol. For lists shorter than k, precision@k is
computed over the available positions.

Annotation files are JSON lines, one record per line:

    {"query_id": "q1", "ranked_item_ids": ["a", "b"], "relevance": {"a": 1},
     "selected_rank": 1, "initial_rank": 12, "updated_rank": 1}

``selected_rank`` supports single-relevant-item evaluations (HITS@k);
``initial_rank``/``updated_rank`` feed the rank-delta statistics for
reranking studies. All three are optional.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence


@dataclass
class AnnotationRecord:
    query_id: str
    ranked_item_ids: list[str]
    relevance: dict[str, int] = field(default_factory=dict)
    selected_rank: int | None = None
    initial_rank: int | None = None
    updated_rank: int | None = None

    def __post_init__(self):
        if self.selected_rank is not None and not (
            1 <= self.selected_rank <= len(self.ranked_item_ids)
        ):
            raise ValueError(
                f"record '{self.query_id}': selected_rank out of range"
            )

    def relevance_list(self) -> list[int]:
        """Binary relevance in rank order; unjudged items are irrelevant."""
        return [1 if self.relevance.get(item, 0) else 0 for item in self.ranked_item_ids]


def average_precision(rel: Sequence[int]) -> float:
    """Mean over relevant positions i (1-based) of precision at i; 0 if none.

    >>> round(average_precision([1, 0, 1]), 4)
    0.8333
    >>> average_precision([0, 0, 0])
    0.0
    """
    if not rel:
        raise ValueError("relevance list must be nonempty")
    hits = 0
    precisions = []
    for i, r in enumerate(rel, start=1):
        if r:
            hits += 1
            precisions.append(hits / i)
    if not precisions:
        return 0.0
    return sum(precisions) / len(precisions)


def mean_average_precision(records: Sequence[AnnotationRecord]) -> float:
    """Mean of per-record average precision."""
    if not records:
        raise ValueError("records must be nonempty")
    return sum(average_precision(r.relevance_list()) for r in records) / len(records)


def mrr(records: Sequence[AnnotationRecord]) -> float:
    """Mean reciprocal rank of the first relevant item; 0 for records with none."""
    if not records:
        raise ValueError("records must be nonempty")
    total = 0.0
    for record in records:
        for i, r in enumerate(record.relevance_list(), start=1):
            if r:
                total += 1.0 / i
                break
    return total / len(records)


def precision_at_k(records: Sequence[AnnotationRecord], k: int) -> float:
    """Mean fraction of relevant items in the top k.

    When a record has fewer than k items, the fraction is computed over the
    positions that exist.
    """
    if not records:
        raise ValueError("records must be nonempty")
    if k < 1:
        raise ValueError("k must be >= 1")
    total = 0.0
    for record in records:
        rel = record.relevance_list()
        depth = min(k, len(rel))
        if depth == 0:
            continue
        total += sum(rel[:depth]) / depth
    return total / len(records)


def hits_at_k(records: Sequence[AnnotationRecord], k: int) -> float:
    """Fraction of records whose single relevant item sits at rank <= k.

    Records without a selected_rank count as misses.
    """
    if not records:
        raise ValueError("records must be nonempty")
    if k < 1:
        raise ValueError("k must be >= 1")
    hits = sum(
        1 for r in records if r.selected_rank is not None and r.selected_rank <= k
    )
    return hits / len(records)


@dataclass
class MetricsReport:
    n_queries: int
    map: float
    mrr: float
    p_at_k: dict[int, float]
    hits_at_k: dict[int, float]
    rank_delta_mean: float | None = None
    rank_delta_std: float | None = None
    rank_delta_min: int | None = None
    rank_delta_max: int | None = None
    n_rank_deltas: int = 0

    def to_dict(self) -> dict:
        return {
            "n_queries": self.n_queries,
            "map": self.map,
            "mrr": self.mrr,
            "p_at_k": {str(k): v for k, v in self.p_at_k.items()},
            "hits_at_k": {str(k): v for k, v in self.hits_at_k.items()},
            "rank_delta": {
                "n": self.n_rank_deltas,
                "mean": self.rank_delta_mean,
                "std": self.rank_delta_std,
                "min": self.rank_delta_min,
                "max": self.rank_delta_max,
            },
        }

    def to_json_bytes(self) -> bytes:
        return (
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"
        ).encode("utf-8")

    def to_table(self) -> str:
        rows = [
            ("queries", str(self.n_queries)),
            ("MAP", f"{self.map:.4f}"),
            ("MRR", f"{self.mrr:.4f}"),
        ]
        for k in sorted(self.p_at_k):
            rows.append((f"P@{k}", f"{self.p_at_k[k]:.4f}"))
        for k in sorted(self.hits_at_k):
            rows.append((f"HITS@{k}", f"{self.hits_at_k[k]:.4f}"))
        if self.n_rank_deltas:
            rows.append(("rank delta mean", f"{self.rank_delta_mean:+.2f}"))
            rows.append(("rank delta std", f"{self.rank_delta_std:.2f}"))
            rows.append(("rank delta min", f"{self.rank_delta_min:+d}"))
            rows.append(("rank delta max", f"{self.rank_delta_max:+d}"))
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)


def parse_annotation_line(line: str, lineno: int) -> AnnotationRecord:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"line {lineno}: invalid JSON: {exc}") from exc
    try:
        return AnnotationRecord(
            query_id=str(raw["query_id"]),
            ranked_item_ids=list(raw["ranked_item_ids"]),
            relevance={str(k): int(v) for k, v in raw.get("relevance", {}).items()},
            selected_rank=raw.get("selected_rank"),
            initial_rank=raw.get("initial_rank"),
            updated_rank=raw.get("updated_rank"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"line {lineno}: {exc}") from exc


def load_annotations(path: str | Path) -> list[AnnotationRecord]:
    """Parse a JSON-lines annotation file; errors carry line numbers."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            records.append(parse_annotation_line(line, lineno))
    if not records:
        raise ValueError(f"annotation file '{path}' contains no records")
    return records


def evaluate_records(
    records: Sequence[AnnotationRecord], ks: Sequence[int] = (1, 5, 10, 15)
) -> MetricsReport:
    deltas = [
        r.initial_rank - r.updated_rank
        for r in records
        if r.initial_rank is not None and r.updated_rank is not None
    ]
    report = MetricsReport(
        n_queries=len(records),
        map=mean_average_precision(records),
        mrr=mrr(records),
        p_at_k={k: precision_at_k(records, k) for k in ks},
        hits_at_k={k: hits_at_k(records, k) for k in ks},
        n_rank_deltas=len(deltas),
    )
    if deltas:
        mean = sum(deltas) / len(deltas)
        report.rank_delta_mean = mean
        report.rank_delta_std = (
            sum((d - mean) ** 2 for d in deltas) / len(deltas)
        ) ** 0.5
        report.rank_delta_min = min(deltas)
        report.rank_delta_max = max(deltas)
    return report


def evaluate_run(path: str | Path, ks: Sequence[int] = (1, 5, 10, 15)) -> MetricsReport:
    """Load an annotation file and aggregate all metrics into one report."""
    return evaluate_records(load_annotations(path), ks=ks)
