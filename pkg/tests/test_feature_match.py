import pytest

from guiscout.corpus import CorpusIndex, GuiComponent, GuiDocument
from guiscout.embedding import DeterministicHashEmbedder
from guiscout.feature_match import (
    AspectGui,
    FeatureQuery,
    FeatureStatus,
    rank_aspect_guis,
    score_feature_component,
    score_feature_gui,
)
from guiscout.fixtures import plant_component, synthetic_gui, token_disjoint_corpus
from guiscout.ranking import RankingConfig, rank_guis

from oracles import oracle_feature_component_score, oracle_feature_gui_score

EMBEDDER = DeterministicHashEmbedder()

# Frozen from the dict-based oracle: "search bar" vs candidates
# {"btn sign in": 0.0, "search bar input": 2/sqrt(6)}.
MAX_SEARCH_BAR_SCORE = 0.816496580927726


def make_index(docs):
    return CorpusIndex(documents={d.gui_id: d for d in docs}, count_total=len(docs))


def feature(text, fid="f1"):
    return FeatureQuery(feature_id=fid, text=text)


class TestFeatureQuery:
    def test_text_must_be_nonempty(self):
        with pytest.raises(ValueError):
            FeatureQuery(feature_id="f1", text="   ")

    def test_transitions_only_out_of_open(self):
        f = feature("search bar")
        f.transition(FeatureStatus.CONFIRMED_WITH_ASPECT)
        with pytest.raises(ValueError):
            f.transition(FeatureStatus.REJECTED)

    def test_cannot_transition_to_open(self):
        f = feature("search bar")
        with pytest.raises(ValueError):
            f.transition(FeatureStatus.OPEN)

    def test_round_trip(self):
        f = feature("search bar")
        assert FeatureQuery.from_dict(f.to_dict()) == f


class TestComponentScore:
    def test_exact_candidate_scores_one(self):
        c = GuiComponent(
            component_id="x", component_type="BUTTON", displayed_text="sign in button"
        )
        got = score_feature_component(feature("sign in button"), c, EMBEDDER)
        assert got == pytest.approx(1.0, abs=1e-9)

    def test_component_without_texts_scores_zero(self):
        c = GuiComponent(component_id="x", component_type="IMAGE")
        assert score_feature_component(feature("anything"), c, EMBEDDER) == 0.0

    def test_max_over_candidates_matches_oracle(self):
        c = GuiComponent(
            component_id="x",
            component_type="TEXT_INPUT",
            displayed_text="btn sign in",
            resource_id="search_bar_input",
        )
        got = score_feature_component(feature("search bar"), c, EMBEDDER)
        assert got == pytest.approx(MAX_SEARCH_BAR_SCORE, abs=1e-12)
        assert got == pytest.approx(
            oracle_feature_component_score("search bar", c), abs=1e-12
        )


class TestGuiScore:
    def test_exact_component_wins_with_its_id(self):
        gui = synthetic_gui("g", ["unrelated words here"])
        plant_component(gui, "sign in button", "planted")
        score, cid = score_feature_gui(feature("sign in button"), gui, EMBEDDER)
        assert score == pytest.approx(1.0, abs=1e-9)
        assert cid == "planted"

    def test_adding_component_never_decreases_score(self):
        gui = synthetic_gui("g", ["alpha beta", "gamma delta"])
        before, _ = score_feature_gui(feature("gamma delta"), gui, EMBEDDER)
        plant_component(gui, "epsilon zeta", "extra")
        after, _ = score_feature_gui(feature("gamma delta"), gui, EMBEDDER)
        assert after >= before

    def test_equals_exhaustive_max_over_components(self):
        gui = synthetic_gui("g", ["browse articles", "read more", "share button"])
        got, _ = score_feature_gui(feature("share article button"), gui, EMBEDDER)
        want = oracle_feature_gui_score("share article button", gui)
        assert got == pytest.approx(want, abs=1e-12)

    def test_tie_broken_by_document_order(self):
        root = GuiComponent(
            component_id="r",
            component_type="CONTAINER",
            children=[
                GuiComponent(component_id="first", component_type="TEXT", displayed_text="same text"),
                GuiComponent(component_id="second", component_type="TEXT", displayed_text="same text"),
            ],
        )
        gui = GuiDocument(gui_id="g", app_id="a", root=root)
        _, cid = score_feature_gui(feature("same text"), gui, EMBEDDER)
        assert cid == "first"


class TestAspectRanking:
    def make_ranked(self, docs, query="app0word0"):
        return rank_guis(query, make_index(docs), RankingConfig(top_k=30), EMBEDDER)

    def test_truncates_to_k_aspect(self):
        docs = token_disjoint_corpus(30)
        ranked = self.make_ranked(docs)
        aspects = rank_aspect_guis(
            feature("anything at all"), ranked, make_index(docs), EMBEDDER, k_aspect=15
        )
        assert len(aspects) == 15

    def test_planted_feature_ranks_first(self):
        docs = token_disjoint_corpus(20)
        plant_component(docs[11], "barcode scanner widget", "planted")
        index = make_index(docs)
        ranked = self.make_ranked(docs)
        aspects = rank_aspect_guis(
            feature("barcode scanner widget"), ranked, index, EMBEDDER
        )
        assert aspects[0].gui_id == "syn011"
        assert aspects[0].component_id == "planted"
        assert aspects[0].gui_score == pytest.approx(1.0, abs=1e-9)

    def test_all_textless_ties_order_by_gui_id(self):
        docs = [
            GuiDocument(
                gui_id=f"g{i}",
                app_id="a",
                root=GuiComponent(component_id="r", component_type="CONTAINER"),
            )
            for i in (3, 1, 2)
        ]
        index = make_index(docs)
        ranked = rank_guis("whatever", index, RankingConfig(), EMBEDDER)
        aspects = rank_aspect_guis(feature("some feature"), ranked, index, EMBEDDER)
        assert [a.gui_id for a in aspects] == ["g1", "g2", "g3"]
        assert all(a.gui_score == 0.0 for a in aspects)

    def test_stable_under_input_permutation(self):
        docs = token_disjoint_corpus(10)
        index = make_index(docs)
        ranked = self.make_ranked(docs)
        aspects_fwd = rank_aspect_guis(feature("app3word1"), ranked, index, EMBEDDER)
        aspects_rev = rank_aspect_guis(
            feature("app3word1"), list(reversed(ranked)), index, EMBEDDER
        )
        assert aspects_fwd == aspects_rev

    def test_aspect_score_equals_gui_score(self):
        docs = token_disjoint_corpus(8)
        index = make_index(docs)
        ranked = self.make_ranked(docs)
        for aspect in rank_aspect_guis(feature("app2word0 app2word1"), ranked, index, EMBEDDER):
            assert aspect.score == aspect.gui_score
            recomputed, cid = score_feature_gui(
                feature("app2word0 app2word1"), index.documents[aspect.gui_id], EMBEDDER
            )
            assert aspect.gui_score == recomputed
            assert aspect.component_id == cid


def test_aspect_gui_round_trip():
    aspect = AspectGui(gui_id="g", component_id="c", score=0.5, gui_score=0.5)
    assert AspectGui.from_dict(aspect.to_dict()) == aspect
