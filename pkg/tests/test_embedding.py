import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guiscout.corpus import CorpusIndex
from guiscout.embedding import (
    DeterministicHashEmbedder,
    EmbeddingCache,
    EmbeddingProviderConfig,
    EmbeddingVector,
    ProviderKind,
    RemoteHttpEmbedder,
    cosine,
    embed_corpus,
    fnv1a_64,
    tokenize,
)
from guiscout.errors import ConfigError, ProviderFormatError, ProviderTransportError
from guiscout.fixtures import demo_corpus

from oracles import oracle_cosine_texts, oracle_embed, oracle_fnv1a_64

EMBEDDER = DeterministicHashEmbedder()

# Computed once with the dict-based oracle in oracles.py and frozen here.
COS_LOGIN_SCREEN_VS_WEATHER_RADAR = 0.0
COS_SEARCH_BAR_VS_SEARCH_BAR_INPUT = 0.816496580927726


def test_fnv1a_matches_independent_implementation():
    for token in ["login", "a", "search", "9", "äöü", "longer-token-text"]:
        assert fnv1a_64(token) == oracle_fnv1a_64(token)


def test_embed_is_deterministic():
    a = EMBEDDER.embed_text("login")
    b = EMBEDDER.embed_text("login")
    assert np.array_equal(a.values, b.values)


def test_empty_text_gives_flagged_zero_vector():
    vec = EMBEDDER.embed_text("")
    assert vec.dim == 256
    assert vec.is_zero
    assert not vec.values.any()


def test_repeated_text_equals_single_after_normalization():
    once = EMBEDDER.embed_text("sign in")
    twice = EMBEDDER.embed_text("sign in sign in")
    assert np.allclose(once.values, twice.values, atol=0, rtol=0)


def test_cosine_identity():
    v = EMBEDDER.embed_text("login screen with a password field")
    assert cosine(v, v) == pytest.approx(1.0, abs=1e-9)


def test_cosine_zero_vector_rule():
    v = EMBEDDER.embed_text("login")
    z = EMBEDDER.embed_text("")
    assert cosine(v, z) == 0.0
    assert cosine(z, z) == 0.0


def test_cosine_dimension_mismatch_is_contract_violation():
    a = DeterministicHashEmbedder(dim=16).embed_text("x")
    b = DeterministicHashEmbedder(dim=32).embed_text("x")
    with pytest.raises(ValueError, match="dimension mismatch"):
        cosine(a, b)


def test_cosine_against_hand_computed_oracle():
    got = cosine(EMBEDDER.embed_text("login screen"), EMBEDDER.embed_text("weather radar"))
    assert got == pytest.approx(COS_LOGIN_SCREEN_VS_WEATHER_RADAR, abs=1e-12)
    assert got == pytest.approx(
        oracle_cosine_texts("login screen", "weather radar"), abs=1e-12
    )
    got2 = cosine(
        EMBEDDER.embed_text("search bar"), EMBEDDER.embed_text("search bar input")
    )
    assert got2 == pytest.approx(COS_SEARCH_BAR_VS_SEARCH_BAR_INPUT, abs=1e-12)
    assert got2 == pytest.approx(
        oracle_cosine_texts("search bar", "search bar input"), abs=1e-12
    )


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=80))
def test_norm_is_unit_or_zero(text):
    vec = EMBEDDER.embed_text(text)
    norm = float(np.sqrt(np.sum(vec.values * vec.values)))
    if vec.is_zero:
        assert norm == 0.0
    else:
        assert abs(norm - 1.0) < 1e-9


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=60), st.text(max_size=60))
def test_cosine_symmetry_exact(a, b):
    va, vb = EMBEDDER.embed_text(a), EMBEDDER.embed_text(b)
    assert cosine(va, vb) == cosine(vb, va)


@settings(max_examples=100, deadline=None)
@given(st.text(max_size=60))
def test_embedding_matches_sparse_oracle(text):
    dense = EMBEDDER.embed_text(text).values
    sparse = oracle_embed(text)
    for index, value in sparse.items():
        assert dense[index] == pytest.approx(value, abs=1e-12)
    assert np.count_nonzero(dense) == len(sparse)


def test_tokenize_rule():
    assert tokenize("Sign-In page, v2!") == ["sign", "in", "page", "v2"]
    assert tokenize("") == []


def test_cross_process_byte_identical():
    import subprocess
    import sys

    text = "cross process determinism check for hashed embeddings"
    snippet = (
        "from guiscout.embedding import DeterministicHashEmbedder;"
        f"print(DeterministicHashEmbedder().embed_text({text!r}).values.tobytes().hex())"
    )
    out = subprocess.run(
        [sys.executable, "-c", snippet], capture_output=True, text=True, check=True
    )
    here = EMBEDDER.embed_text(text).values.tobytes().hex()
    assert out.stdout.strip() == here


class TestProviderConfig:
    def test_remote_requires_endpoint(self):
        with pytest.raises(ConfigError):
            EmbeddingProviderConfig(provider_kind=ProviderKind.REMOTE_HTTP)

    def test_config_hash_changes_with_dim(self):
        a = EmbeddingProviderConfig(dim=256)
        b = EmbeddingProviderConfig(dim=128)
        assert a.config_hash() != b.config_hash()


def make_index(docs):
    return CorpusIndex(documents={d.gui_id: d for d in docs}, count_total=len(docs))


class TestEmbedCorpus:
    def test_vector_counts(self):
        index = make_index(demo_corpus())
        cache = embed_corpus(index, EMBEDDER)
        # 60 full texts + 60 * 3 descriptions
        assert len(cache) == 240
        assert cache.computed_count == 240

    def test_cache_hit_skips_recompute(self, tmp_path):
        index = make_index(demo_corpus())
        path = tmp_path / "cache.json"
        first = embed_corpus(index, EMBEDDER, cache_path=path)
        assert first.computed_count == 240
        second = embed_corpus(index, EMBEDDER, cache_path=path)
        assert second.computed_count == 0
        v1 = first.get("shopmart-login", "full_text")
        v2 = second.get("shopmart-login", "full_text")
        assert v1 is not None and v2 is not None
        assert np.array_equal(v1.values, v2.values)

    def test_changed_dim_recomputes(self, tmp_path):
        index = make_index(demo_corpus())
        path = tmp_path / "cache.json"
        embed_corpus(index, EMBEDDER, cache_path=path)
        other = DeterministicHashEmbedder(dim=128)
        config = EmbeddingProviderConfig(dim=128)
        again = embed_corpus(index, other, config=config, cache_path=path)
        assert again.computed_count == 240
        vec = again.get("shopmart-login", "full_text")
        assert vec is not None and vec.dim == 128

    def test_changed_corpus_recomputes(self, tmp_path):
        docs = demo_corpus()
        index = make_index(docs)
        path = tmp_path / "cache.json"
        embed_corpus(index, EMBEDDER, cache_path=path)
        docs[0].s2w_descriptions[0] = "something new entirely"
        again = embed_corpus(make_index(docs), EMBEDDER, cache_path=path)
        assert again.computed_count == 240

    def test_description_keys(self):
        index = make_index(demo_corpus())
        cache = embed_corpus(index, EMBEDDER)
        assert cache.get("shopmart-login", "description", 2) is not None
        assert cache.get("shopmart-login", "description", 3) is None


class _EmbeddingHandler(BaseHTTPRequestHandler):
    status = 200

    def do_POST(self):
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        texts = body["texts"]
        vectors = [[float(len(t)), 1.0, 0.0, 0.0] for t in texts]
        payload = json.dumps({"vectors": vectors}).encode()
        self.send_response(self.status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        if self.status == 200:
            self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture()
def embedding_server():
    server = HTTPServer(("127.0.0.1", 0), _EmbeddingHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()


class TestRemoteEmbedder:
    def test_returns_normalized_vectors(self, embedding_server):
        embedder = RemoteHttpEmbedder(endpoint=embedding_server, dim=4)
        vec = embedder.embed_text("abc")
        assert vec.dim == 4
        assert float(np.linalg.norm(vec.values)) == pytest.approx(1.0, abs=1e-9)

    def test_unreachable_endpoint_is_retryable_transport_error(self):
        embedder = RemoteHttpEmbedder(
            endpoint="http://127.0.0.1:9", dim=4, timeout=0.2
        )
        with pytest.raises(ProviderTransportError) as info:
            embedder.embed_text("abc")
        assert info.value.retryable

    def test_wrong_dimension_is_format_error(self, embedding_server):
        embedder = RemoteHttpEmbedder(endpoint=embedding_server, dim=7)
        with pytest.raises(ProviderFormatError):
            embedder.embed_text("abc")


def test_cache_round_trip_preserves_floats(tmp_path):
    cache = EmbeddingCache("cfg", "corp", 4)
    cache.put("g1", "full_text", 0, EmbeddingVector(np.array([0.5, 0.5, 0.5, 0.5])))
    cache.put("g1", "description", 0, EmbeddingVector(np.array([1.0, 0.0, 0.0, 0.0])))
    path = tmp_path / "c.json"
    cache.save(path)
    loaded = EmbeddingCache.load(path)
    assert len(loaded) == 2
    v = loaded.get("g1", "full_text")
    assert v is not None
    assert np.array_equal(v.values, np.array([0.5, 0.5, 0.5, 0.5]))
