import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from assaysem.errors import EmbeddingFormatError, FitError, MissingEmbeddingError
from assaysem.vectorize import fit_tfidf, load_embeddings, tokenize
from conftest import make_record


class TestTokenize:
    def test_splits_and_lowercases(self):
        assert tokenize("Cell-based format.") == ["cell", "based", "format"]

    def test_empty(self):
        assert tokenize("") == []

    def test_drops_pure_numbers(self):
        assert tokenize("25 degree celcius") == ["degree", "celcius"]

    def test_drops_short_tokens(self):
        assert tokenize("a an x10 assay") == ["an", "x10", "assay"]

    @given(st.text())
    def test_deterministic_and_wellformed(self, text):
        tokens = tokenize(text)
        assert tokens == tokenize(text)
        assert all(len(t) >= 2 for t in tokens)


class TestFitTfidf:
    def test_term_in_every_doc_has_idf_one(self):
        model = fit_tfidf(["assay one shared", "assay two shared", "assay three shared"])
        idx = model.vocabulary["shared"]
        assert model.idf[idx] == pytest.approx(1.0)

    def test_idf_formula(self):
        model = fit_tfidf(["rare token here", "common words only"])
        idx = model.vocabulary["rare"]
        assert model.idf[idx] == pytest.approx(math.log(3 / 2) + 1, abs=1e-9)

    def test_all_empty_corpus_is_fit_error(self):
        with pytest.raises(FitError):
            fit_tfidf(["", "12 34", "a"])

    def test_dimension_matches_vocabulary(self):
        model = fit_tfidf(["alpha beta", "gamma delta"])
        assert model.dimension == len(model.vocabulary) == len(model.idf)
        assert np.all(model.idf >= 0)


class TestTransform:
    def test_l2_normalized(self):
        model = fit_tfidf(["kinase assay screen", "viability assay culture"])
        vec = model.transform(make_record("x", "kinase assay"))
        assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-9)

    def test_out_of_vocabulary_gives_zero_vector(self):
        model = fit_tfidf(["kinase assay screen"])
        vec = model.transform(make_record("x", "entirely unrelated words"))
        assert np.linalg.norm(vec) == 0.0

    def test_vocabulary_closure(self):
        model = fit_tfidf(["alpha beta gamma"])
        vec = model.transform(make_record("x", "alpha adversarialunseen zzz beta"))
        nonzero = {t for t, i in model.vocabulary.items() if vec[i] != 0}
        assert nonzero <= set(model.vocabulary)
        assert nonzero == {"alpha", "beta"}

    def test_cosine_self_similarity(self):
        model = fit_tfidf(["one two three", "two three four"])
        v = model.transform(make_record("x", "two three"))
        assert float(v @ v) / (np.linalg.norm(v) ** 2) == pytest.approx(1.0, abs=1e-9)

    def test_deterministic(self):
        model = fit_tfidf(["one two three", "two three four"])
        rec = make_record("x", "three four")
        assert np.array_equal(model.transform(rec), model.transform(rec))


def _write_embeddings(tmp_path, rows, meta=None):
    path = tmp_path / "emb.jsonl"
    lines = []
    if meta is not None:
        lines.append(json.dumps({"meta": meta}))
    lines += [json.dumps(r) for r in rows]
    path.write_text("\n".join(lines), encoding="utf-8")
    return path


class TestEmbeddings:
    def test_uniform_dimension(self, tmp_path):
        rows = [{"id": f"a{i}", "vector": [0.1] * 768} for i in range(3)]
        model = load_embeddings(_write_embeddings(tmp_path, rows))
        assert model.dimension == 768
        assert len(model.table) == 3

    def test_single_row_sets_dimension(self, tmp_path):
        model = load_embeddings(_write_embeddings(tmp_path, [{"id": "a", "vector": [1.0, 2.0]}]))
        assert model.dimension == 2

    def test_dimension_mismatch(self, tmp_path):
        rows = [{"id": "a", "vector": [1.0, 2.0]}, {"id": "b", "vector": [1.0]}]
        with pytest.raises(EmbeddingFormatError):
            load_embeddings(_write_embeddings(tmp_path, rows))

    def test_nan_rejected(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        path.write_text('{"id": "a", "vector": [1.0, NaN]}\n', encoding="utf-8")
        with pytest.raises(EmbeddingFormatError):
            load_embeddings(path)

    def test_meta_header(self, tmp_path):
        path = _write_embeddings(
            tmp_path, [{"id": "a", "vector": [1.0]}],
            meta={"producer": "scibert", "pooling": "mean"},
        )
        model = load_embeddings(path)
        assert model.meta["pooling"] == "mean"
        assert "scibert" in model.fingerprint()

    def test_missing_id_on_transform(self, tmp_path):
        model = load_embeddings(_write_embeddings(tmp_path, [{"id": "a", "vector": [1.0]}]))
        with pytest.raises(MissingEmbeddingError):
            model.transform(make_record("unknown", "text"))

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(EmbeddingFormatError):
            load_embeddings(path)
