import json

import pytest

from guiscout.corpus import (
    CorpusIndex,
    FilterRules,
    GuiComponent,
    GuiDocument,
    component_text_candidates,
    filter_corpus,
    flatten_hierarchy_for_prompt,
    gui_full_text,
    load_corpus,
    split_identifier,
    write_corpus,
)
from guiscout.errors import ConfigError, CorpusSourceError
from guiscout.fixtures import demo_corpus


@pytest.fixture()
def corpus_dir(tmp_path):
    write_corpus(tmp_path / "corpus", demo_corpus())
    return tmp_path / "corpus"


def make_index(docs):
    return CorpusIndex(documents={d.gui_id: d for d in docs}, count_total=len(docs))


class TestLoadCorpus:
    def test_loads_all_valid_records(self, corpus_dir):
        index = load_corpus(corpus_dir)
        assert len(index) == 60
        assert index.count_total == 60
        assert not index.errors

    def test_record_missing_gui_id_is_reported_not_dropped_silently(self, corpus_dir):
        bad = json.loads((corpus_dir / "shopmart-login.json").read_text())
        del bad["gui_id"]
        (corpus_dir / "shopmart-login.json").write_text(json.dumps(bad))
        index = load_corpus(corpus_dir)
        assert len(index) == 59
        assert len(index.errors) == 1
        assert "shopmart-login.json" in index.errors[0].source
        assert "gui_id" in index.errors[0].reason

    def test_empty_directory_loads_empty_index(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        index = load_corpus(empty)
        assert len(index) == 0
        assert not index.errors

    def test_missing_source_is_fatal(self, tmp_path):
        with pytest.raises(CorpusSourceError):
            load_corpus(tmp_path / "nope")

    def test_unknown_component_type_rejected(self, corpus_dir):
        raw = json.loads((corpus_dir / "bankly-login.json").read_text())
        raw["root"]["component_type"] = "BLINK_TAG"
        (corpus_dir / "bankly-login.json").write_text(json.dumps(raw))
        index = load_corpus(corpus_dir)
        assert "bankly-login" not in index.documents
        assert any("BLINK_TAG" in e.reason for e in index.errors)

    def test_invalid_bounds_rejected(self, corpus_dir):
        raw = json.loads((corpus_dir / "bankly-login.json").read_text())
        raw["root"]["bounds"] = [100, 0, 50, 10]
        (corpus_dir / "bankly-login.json").write_text(json.dumps(raw))
        index = load_corpus(corpus_dir)
        assert any("bounds" in e.reason for e in index.errors)

    def test_duplicate_component_ids_rejected(self, corpus_dir):
        raw = json.loads((corpus_dir / "bankly-login.json").read_text())
        raw["root"]["children"][0]["children"][0]["component_id"] = "c0"
        (corpus_dir / "bankly-login.json").write_text(json.dumps(raw))
        index = load_corpus(corpus_dir)
        assert any("duplicate component_id" in e.reason for e in index.errors)

    def test_more_than_five_descriptions_rejected(self, corpus_dir):
        raw = json.loads((corpus_dir / "bankly-login.json").read_text())
        raw["s2w_descriptions"] = [f"d{i}" for i in range(6)]
        (corpus_dir / "bankly-login.json").write_text(json.dumps(raw))
        index = load_corpus(corpus_dir)
        assert any("s2w_descriptions" in e.reason for e in index.errors)

    def test_round_trip_preserves_index(self, corpus_dir, tmp_path):
        index = load_corpus(corpus_dir)
        write_corpus(tmp_path / "again", list(index.iter_sorted()))
        reloaded = load_corpus(tmp_path / "again")
        assert reloaded == index

    def test_bad_manifest_version_is_fatal(self, corpus_dir):
        (corpus_dir / "corpus.manifest.json").write_text(
            json.dumps({"schema_version": 99})
        )
        with pytest.raises(CorpusSourceError):
            load_corpus(corpus_dir)


class TestFilterCorpus:
    def test_flag_filter_removes_flagged_docs(self, corpus_dir):
        index = load_corpus(corpus_dir)
        filtered, report = filter_corpus(
            index, FilterRules(exclude_flags=frozenset({"opened_menu"}))
        )
        assert len(filtered) == 56
        assert report.removed_count == 4
        assert report.per_filter_counts == {"flag:opened_menu": 4}
        assert all(
            "opened_menu" not in d.filter_flags for d in filtered.documents.values()
        )

    def test_min_components_predicate(self, corpus_dir):
        index = load_corpus(corpus_dir)
        filtered, report = filter_corpus(index, FilterRules(min_components=3))
        assert "snapgallery-splash" not in filtered.documents
        assert ("snapgallery-splash", ["min_components:3"]) in report.removed

    def test_language_filter(self, corpus_dir):
        index = load_corpus(corpus_dir)
        filtered, _ = filter_corpus(
            index, FilterRules(language_tags=frozenset({"en"}))
        )
        assert "skycast-settings" not in filtered.documents
        assert len(filtered) == 59

    def test_empty_rules_are_identity(self, corpus_dir):
        index = load_corpus(corpus_dir)
        filtered, report = filter_corpus(index, FilterRules())
        assert filtered.documents == index.documents
        assert report.removed_count == 0
        assert report.per_filter_counts == {}

    def test_filtering_is_idempotent(self, corpus_dir):
        index = load_corpus(corpus_dir)
        rules = FilterRules(exclude_flags=frozenset({"opened_menu"}), min_components=3)
        once, _ = filter_corpus(index, rules)
        twice, report = filter_corpus(once, rules)
        assert twice.documents == once.documents
        assert report.removed_count == 0

    def test_count_conservation(self, corpus_dir):
        index = load_corpus(corpus_dir)
        filtered, report = filter_corpus(
            index,
            FilterRules(exclude_flags=frozenset({"opened_menu", "non_app_screen"})),
        )
        assert filtered.count_total == filtered.count_filtered + len(filtered)
        assert sum(report.per_filter_counts.values()) >= report.removed_count

    def test_unknown_rule_name_is_config_error(self):
        with pytest.raises(ConfigError, match="max_depth"):
            FilterRules.from_dict({"max_depth": 3})


class TestTextExtraction:
    def test_candidates_for_fully_populated_component(self):
        c = GuiComponent(
            component_id="x",
            component_type="BUTTON",
            displayed_text="Sign in",
            resource_id="btn_sign_in",
            semantic_classes=["login button"],
        )
        assert component_text_candidates(c) == ["Sign in", "btn sign in", "login button"]

    def test_candidates_empty_component(self):
        c = GuiComponent(component_id="x", component_type="IMAGE")
        assert component_text_candidates(c) == []

    def test_candidates_never_contain_empty_strings(self):
        c = GuiComponent(
            component_id="x",
            component_type="TEXT",
            displayed_text="   ",
            resource_id="__--__",
            semantic_classes=["", "  "],
        )
        assert component_text_candidates(c) == []

    @pytest.mark.parametrize(
        "identifier,expected",
        [
            ("searchBarInput", "search bar input"),
            ("btn_sign_in", "btn sign in"),
            ("nav-drawer-item", "nav drawer item"),
            ("com.app:id/btn_ok", "com app id btn ok"),
            ("price2go", "price2go"),
        ],
    )
    def test_identifier_splitting(self, identifier, expected):
        assert split_identifier(identifier) == expected


class TestFlatten:
    def test_leaf_line_format(self):
        doc = GuiDocument(
            gui_id="g",
            app_id="a",
            root=GuiComponent(
                component_id="r",
                component_type="CONTAINER",
                children=[
                    GuiComponent(
                        component_id="b",
                        component_type="BUTTON",
                        displayed_text="Sign in",
                        resource_id="btn_sign_in",
                    )
                ],
            ),
        )
        assert '- "Sign in" (BUTTON) (btn_sign_in)' in flatten_hierarchy_for_prompt(doc)

    def test_container_renders_header_plus_indented_items(self):
        root = GuiComponent(
            component_id="r",
            component_type="CONTAINER",
            resource_id="panel",
            children=[
                GuiComponent(component_id="a", component_type="TEXT", displayed_text="A"),
                GuiComponent(component_id="b", component_type="TEXT", displayed_text="B"),
            ],
        )
        doc = GuiDocument(gui_id="g", app_id="a", root=root)
        lines = flatten_hierarchy_for_prompt(doc).splitlines()
        assert lines[0] == '"" (CONTAINER) (panel)'
        assert lines[1] == '  - "A" (TEXT) ()'
        assert lines[2] == '  - "B" (TEXT) ()'

    def test_empty_fields_render_as_empty_parentheses(self):
        doc = GuiDocument(
            gui_id="g",
            app_id="a",
            root=GuiComponent(component_id="r", component_type="TEXT"),
        )
        assert '- "" (TEXT) ()' in flatten_hierarchy_for_prompt(doc)

    def test_component_without_container_goes_ungrouped(self):
        root = GuiComponent(
            component_id="r",
            component_type="LIST",
            children=[
                GuiComponent(component_id="a", component_type="TEXT", displayed_text="A")
            ],
        )
        doc = GuiDocument(gui_id="g", app_id="a", root=root)
        flat = flatten_hierarchy_for_prompt(doc)
        assert flat.splitlines()[0] == "(ungrouped)"

    def test_deterministic(self):
        doc = demo_corpus()[5]
        assert flatten_hierarchy_for_prompt(doc) == flatten_hierarchy_for_prompt(doc)

    def test_every_leaf_listed_exactly_once(self):
        for doc in demo_corpus():
            flat = flatten_hierarchy_for_prompt(doc)
            item_lines = [l for l in flat.splitlines() if l.startswith("  - ")]
            leaves = [c for c in doc.components() if c.is_leaf()]
            assert len(item_lines) == len(leaves)
            for leaf in leaves:
                assert f"({leaf.resource_id})" in flat

    def test_nested_containers_group_by_nearest(self):
        inner = GuiComponent(
            component_id="inner",
            component_type="CONTAINER",
            resource_id="inner_box",
            children=[
                GuiComponent(component_id="x", component_type="TEXT", displayed_text="X")
            ],
        )
        root = GuiComponent(
            component_id="outer",
            component_type="CONTAINER",
            resource_id="outer_box",
            children=[
                inner,
                GuiComponent(component_id="y", component_type="TEXT", displayed_text="Y"),
            ],
        )
        doc = GuiDocument(gui_id="g", app_id="a", root=root)
        lines = flatten_hierarchy_for_prompt(doc).splitlines()
        assert lines.index('"" (CONTAINER) (inner_box)') < lines.index('  - "X" (TEXT) ()')
        assert '  - "Y" (TEXT) ()' in lines


class TestFullText:
    def test_single_component_concatenation(self):
        doc = GuiDocument(
            gui_id="g",
            app_id="a",
            root=GuiComponent(
                component_id="r",
                component_type="BUTTON",
                displayed_text="Sign in",
                resource_id="btn_sign_in",
            ),
        )
        assert gui_full_text(doc) == "Sign in btn sign in"

    def test_textless_gui_gives_empty_string(self):
        doc = GuiDocument(
            gui_id="g",
            app_id="a",
            root=GuiComponent(component_id="r", component_type="CONTAINER"),
        )
        assert gui_full_text(doc) == ""

    def test_sibling_permutation_preserves_token_multiset(self):
        kids = [
            GuiComponent(component_id="a", component_type="TEXT", displayed_text="alpha beta"),
            GuiComponent(component_id="b", component_type="TEXT", displayed_text="gamma delta"),
        ]
        doc1 = GuiDocument(
            gui_id="g", app_id="a",
            root=GuiComponent(component_id="r", component_type="CONTAINER", children=kids),
        )
        doc2 = GuiDocument(
            gui_id="g", app_id="a",
            root=GuiComponent(
                component_id="r", component_type="CONTAINER", children=list(reversed(kids))
            ),
        )
        assert gui_full_text(doc1) != gui_full_text(doc2)
        assert sorted(gui_full_text(doc1).split()) == sorted(gui_full_text(doc2).split())
