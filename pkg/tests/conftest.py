import json

import numpy as np
import pytest

from assaysem.corpus import BioassayRecord, Corpus, Statement


def make_record(rid, text="some assay text", statements=()):
    return BioassayRecord(
        id=rid,
        text=text,
        statements=frozenset(Statement(p, v) for p, v in statements),
    )


@pytest.fixture
def toy_corpus():
    """Four assays in two obvious text groups with overlapping statements."""
    return Corpus(
        records=(
            make_record("a1", "kinase inhibition assay with luciferase readout",
                        [("has format", "biochemical"), ("has detection", "luminescence")]),
            make_record("a2", "kinase inhibition assay measured by luciferase",
                        [("has format", "biochemical"), ("has target", "kinase")]),
            make_record("a3", "cell viability screen in hepatocyte culture",
                        [("has format", "cell-based"), ("has detection", "fluorescence")]),
            make_record("a4", "cell viability screen using cultured hepatocytes",
                        [("has format", "cell-based"), ("has target", "hepatocyte")]),
        )
    )


def gaussian_blobs(n_per_blob=30, centers=((0.0, 0.0), (20.0, 0.0), (0.0, 20.0)),
                   spread=0.5, seed=7):
    rng = np.random.default_rng(seed)
    points = [rng.normal(c, spread, size=(n_per_blob, len(c))) for c in centers]
    return np.concatenate(points)


def scripps_document(n_with_text, n_without_text, n_missing_id=0, refs=None):
    """Depositor fixture in the built-in scripps profile layout."""
    assays = []
    for i in range(n_with_text):
        assays.append({
            "descr": {
                "aid": {"id": f"AID{i:05d}"},
                "description": [f"Overview paragraph for assay {i}.", "More detail."],
                "protocol": [f"Protocol summary for assay {i}."],
                "xref": [{"pmid": r} for r in (refs or {}).get(i, [])],
            }
        })
    for i in range(n_without_text):
        assays.append({
            "descr": {
                "aid": {"id": f"NOTEXT{i:05d}"},
                "comment": ["no description sections here"],
            }
        })
    for _ in range(n_missing_id):
        assays.append({"descr": {"description": ["text but no id"]}})
    return {"assays": assays}


def write_json(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path
