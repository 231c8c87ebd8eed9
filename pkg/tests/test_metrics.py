import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guiscout.metrics import (
    AnnotationRecord,
    average_precision,
    evaluate_records,
    evaluate_run,
    hits_at_k,
    load_annotations,
    mean_average_precision,
    mrr,
    precision_at_k,
)

from oracles import (
    oracle_average_precision,
    oracle_hits_at_k,
    oracle_mrr,
    oracle_precision_at_k,
)


def record_from_rel(rel, query_id="q", selected_rank=None):
    items = [f"item{i}" for i in range(len(rel))]
    return AnnotationRecord(
        query_id=query_id,
        ranked_item_ids=items,
        relevance={items[i]: r for i, r in enumerate(rel)},
        selected_rank=selected_rank,
    )


def random_records(n, rng, max_len=20):
    records = []
    for i in range(n):
        length = rng.randint(1, max_len)
        rel = [rng.randint(0, 1) for _ in range(length)]
        selected = rng.randint(1, length) if rng.random() < 0.8 else None
        records.append(record_from_rel(rel, query_id=f"q{i}", selected_rank=selected))
    return records


class TestAveragePrecision:
    def test_definition_arithmetic(self):
        assert average_precision([1, 0, 1]) == pytest.approx((1 / 1 + 2 / 3) / 2)

    def test_no_relevant_items(self):
        assert average_precision([0, 0, 0]) == 0.0

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            average_precision([])

    def test_random_lists_match_brute_force(self):
        rng = random.Random(13)
        for _ in range(200):
            rel = [rng.randint(0, 1) for _ in range(10)]
            assert average_precision(rel) == pytest.approx(
                oracle_average_precision(rel), abs=1e-12
            )

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=1), min_size=1, max_size=30))
    def test_bounded_and_matches_oracle(self, rel):
        value = average_precision(rel)
        assert 0.0 <= value <= 1.0
        assert value == pytest.approx(oracle_average_precision(rel), abs=1e-12)

    def test_map_is_one_iff_relevant_prefix(self):
        assert mean_average_precision([record_from_rel([1, 1, 0, 0])]) == 1.0
        assert mean_average_precision([record_from_rel([1, 0, 1, 0])]) < 1.0


class TestMrr:
    def test_first_relevant_ranks(self):
        records = [record_from_rel([1, 0]), record_from_rel([0, 1])]
        assert mrr(records) == pytest.approx(0.75)

    def test_record_without_relevant_counts_zero(self):
        records = [record_from_rel([1, 0]), record_from_rel([0, 0])]
        assert mrr(records) == pytest.approx(0.5)

    def test_reciprocal_relation_on_synthetic_single_relevant_records(self):
        # mrr is the mean reciprocal of the first relevant rank, so 1/mrr is
        # the harmonic mean of those ranks; an mrr of .816 corresponds to a
        # harmonic-mean first rank of about 1.2255
        first_ranks = [1, 1, 1, 2]
        records = []
        for rank in first_ranks:
            rel = [0] * 5
            rel[rank - 1] = 1
            records.append(record_from_rel(rel))
        got = mrr(records)
        assert got == pytest.approx(sum(1 / r for r in first_ranks) / len(first_ranks), abs=1e-12)
        harmonic_mean_rank = 1.0 / got
        assert harmonic_mean_rank == pytest.approx(len(first_ranks) / sum(1 / r for r in first_ranks))
        assert 1.0 / 0.816 == pytest.approx(1.2255, abs=5e-4)


class TestPrecisionAtK:
    def test_basic(self):
        records = [record_from_rel([1, 0, 1, 0])]
        assert precision_at_k(records, 1) == 1.0
        assert precision_at_k(records, 2) == 0.5
        assert precision_at_k(records, 4) == 0.5

    def test_k_beyond_length_uses_available_positions(self):
        records = [record_from_rel([1, 1])]
        assert precision_at_k(records, 10) == 1.0

    def test_appending_irrelevant_never_raises_p_at_k(self):
        rng = random.Random(7)
        for _ in range(50):
            rel = [rng.randint(0, 1) for _ in range(10)]
            k = rng.randint(1, 10)
            base = precision_at_k([record_from_rel(rel)], k)
            extended = precision_at_k([record_from_rel(rel + [0, 0, 0])], k)
            assert extended <= base + 1e-15


class TestHitsAtK:
    def test_single_record_thresholds(self):
        record = record_from_rel([0, 0, 1], selected_rank=3)
        assert hits_at_k([record], 1) == 0.0
        assert hits_at_k([record], 15) == 1.0

    def test_selected_rank_range_enforced(self):
        with pytest.raises(ValueError):
            record_from_rel([1, 0], selected_rank=5)


class TestOracleEquivalence:
    def test_thousand_random_records(self):
        rng = random.Random(99)
        records = random_records(1000, rng)
        rel_lists = [r.relevance_list() for r in records]
        selected = [r.selected_rank for r in records]

        got_map = mean_average_precision(records)
        want_map = sum(oracle_average_precision(r) for r in rel_lists) / len(rel_lists)
        assert abs(got_map - want_map) < 1e-12

        assert abs(mrr(records) - oracle_mrr(rel_lists)) < 1e-12
        for k in (1, 5, 10, 15):
            assert abs(precision_at_k(records, k) - oracle_precision_at_k(rel_lists, k)) < 1e-12
            assert abs(hits_at_k(records, k) - oracle_hits_at_k(selected, k)) < 1e-12


class TestEvaluateRun:
    def write_annotations(self, path, records):
        lines = []
        for r in records:
            lines.append(
                json.dumps(
                    {
                        "query_id": r.query_id,
                        "ranked_item_ids": r.ranked_item_ids,
                        "relevance": r.relevance,
                        "selected_rank": r.selected_rank,
                    }
                )
            )
        path.write_text("\n".join(lines) + "\n")

    def test_synthetic_720_record_run(self, tmp_path):
        rng = random.Random(5)
        records = random_records(720, rng, max_len=15)
        path = tmp_path / "annotations.jsonl"
        self.write_annotations(path, records)
        report = evaluate_run(path)
        assert report.n_queries == 720
        assert 0.0 <= report.map <= 1.0
        assert 0.0 <= report.mrr <= 1.0
        assert set(report.p_at_k) == {1, 5, 10, 15}
        assert all(0.0 <= v <= 1.0 for v in report.p_at_k.values())
        assert all(0.0 <= v <= 1.0 for v in report.hits_at_k.values())

    def test_report_recomputation_is_byte_identical(self, tmp_path):
        rng = random.Random(6)
        records = random_records(50, rng)
        path = tmp_path / "annotations.jsonl"
        self.write_annotations(path, records)
        assert evaluate_run(path).to_json_bytes() == evaluate_run(path).to_json_bytes()

    def test_empty_file_is_error(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(ValueError):
            evaluate_run(path)

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"query_id": "q", "ranked_item_ids": ["a"]}\nnot json\n')
        with pytest.raises(ValueError, match="line 2"):
            load_annotations(path)

    def test_rank_delta_statistics(self):
        records = [
            AnnotationRecord(
                query_id="q1",
                ranked_item_ids=["a"],
                relevance={"a": 1},
                initial_rank=12,
                updated_rank=1,
            ),
            AnnotationRecord(
                query_id="q2",
                ranked_item_ids=["a"],
                relevance={},
                initial_rank=3,
                updated_rank=5,
            ),
        ]
        report = evaluate_records(records)
        assert report.n_rank_deltas == 2
        assert report.rank_delta_mean == pytest.approx((11 - 2) / 2)
        assert report.rank_delta_min == -2
        assert report.rank_delta_max == 11

    def test_table_output_contains_all_metrics(self, tmp_path):
        rng = random.Random(8)
        records = random_records(20, rng)
        path = tmp_path / "a.jsonl"
        self.write_annotations(path, records)
        table = evaluate_run(path).to_table()
        for label in ("MAP", "MRR", "P@10", "HITS@15", "queries"):
            assert label in table
