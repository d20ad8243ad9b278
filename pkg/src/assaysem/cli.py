"""Command-line interface for corpus tooling, training, evaluation, and serving."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from assaysem import baseline as baseline_mod
from assaysem import cluster as cluster_mod
from assaysem import corpus as corpus_mod
from assaysem import evaluate as eval_mod
from assaysem import ingest as ingest_mod
from assaysem import vectorize as vec_mod
from assaysem.semantifier import Semantifier, train_semantifier


def _parse_range(spec: str) -> list[int]:
    """'50:600:50' -> [50, 100, ..., 600]; '50,100,150' -> [50, 100, 150]."""
    if ":" in spec:
        start, stop, step = (int(p) for p in spec.split(":"))
        return list(range(start, stop + 1, step))
    return [int(p) for p in spec.split(",")]


@click.group()
def main():
    """Bioassay semantification toolkit."""


# -- corpus -----------------------------------------------------------------


@main.group()
def corpus():
    """Corpus loading, validation, and statistics."""


@corpus.command("stats")
@click.argument("path", type=click.Path(exists=True))
def corpus_stats_cmd(path):
    c = corpus_mod.load_corpus(path)
    stats = corpus_mod.corpus_stats(c)
    click.echo(json.dumps(stats.as_dict(), indent=2))


@corpus.command("validate")
@click.argument("path", type=click.Path(exists=True))
def corpus_validate_cmd(path):
    c = corpus_mod.load_corpus(path)
    report = c.load_report
    click.echo(f"loaded {report.loaded}/{report.total_lines} records from {path}")
    for lineno, reason in report.malformed:
        click.echo(f"  line {lineno}: {reason}", err=True)
    if report.malformed:
        sys.exit(1)


# -- vectorize --------------------------------------------------------------


@main.group()
def vectorize():
    """TF-IDF fitting and corpus transformation."""


@vectorize.command("fit")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def vectorize_fit_cmd(corpus_path, out):
    c = corpus_mod.load_corpus(corpus_path)
    model = vec_mod.fit_tfidf([r.text for r in c])
    Path(out).write_text(json.dumps(model.as_dict()), encoding="utf-8")
    click.echo(f"fitted {model.fingerprint()} -> {out}")


@vectorize.command("transform")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def vectorize_transform_cmd(model_path, corpus_path, out):
    model = vec_mod.TfidfModel.from_dict(
        json.loads(Path(model_path).read_text(encoding="utf-8"))
    )
    c = corpus_mod.load_corpus(corpus_path)
    with Path(out).open("w", encoding="utf-8") as fh:
        for rec in c:
            vec = model.transform(rec)
            fh.write(json.dumps({"id": rec.id, "vector": vec.tolist()}) + "\n")
    click.echo(f"wrote {len(c)} vectors -> {out}")


# -- cluster ----------------------------------------------------------------


@main.group()
def cluster():
    """K-means fitting, elbow selection, and semantification."""


def _load_vectors(path: str) -> tuple[list[str], np.ndarray]:
    model = vec_mod.load_embeddings(path)
    ids = sorted(model.table)
    return ids, np.stack([model.table[i] for i in ids])


@cluster.command("fit")
@click.option("--vectors", "vectors_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True),
              help="gold corpus supplying the statements to attach")
@click.option("--k", required=True, type=int)
@click.option("--seed", default=13, type=int)
@click.option("--out", required=True, type=click.Path())
def cluster_fit_cmd(vectors_path, corpus_path, k, seed, out):
    ids, x = _load_vectors(vectors_path)
    by_id = corpus_mod.load_corpus(corpus_path).by_id()
    records = [by_id[i] for i in ids]
    fit = cluster_mod.fit_kmeans(x, k, seed)
    model = cluster_mod.attach_statements(fit, records)
    model.save(out)
    click.echo(f"k={k} inertia={model.inertia:.4f} iters={fit.n_iter} -> {out}")


@cluster.command("semantify")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True),
              help="semantifier snapshot (vectorizer + clusters)")
@click.option("--text", "text_path", required=True, type=click.Path(exists=True))
@click.option("--threshold", default=1, type=int)
def cluster_semantify_cmd(model_path, text_path, threshold):
    semantifier = Semantifier.load(model_path)
    text = Path(text_path).read_text(encoding="utf-8")
    result = semantifier.semantify_text(text, threshold)
    click.echo(
        json.dumps(
            {
                "cluster_index": result.cluster_index,
                "distance": result.distance,
                "statements": [s.as_dict() for s in sorted(result.statements)],
            },
            indent=2,
        )
    )


@cluster.command("elbow")
@click.option("--vectors", "vectors_path", required=True, type=click.Path(exists=True))
@click.option("--k-range", "k_range", required=True)
@click.option("--seed", default=13, type=int)
@click.option("--out", type=click.Path(), default=None, help="write the inertia curve as CSV")
def cluster_elbow_cmd(vectors_path, k_range, seed, out):
    _, x = _load_vectors(vectors_path)
    result = cluster_mod.elbow_select(x, _parse_range(k_range), seed)
    curve = "k,inertia\n" + "".join(
        f"{k},{i}\n" for k, i in zip(result.k_candidates, result.inertias)
    )
    if out:
        Path(out).write_text(curve, encoding="utf-8")
    else:
        click.echo(curve, nl=False)
    click.echo(f"selected k={result.selected_k}")


# -- train (snapshot for serving) -------------------------------------------


@main.command("train")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--k", required=True, type=int)
@click.option("--seed", default=13, type=int)
@click.option("--out", required=True, type=click.Path())
def train_cmd(corpus_path, k, seed, out):
    """Fit a deployable semantifier snapshot on a gold corpus."""
    c = corpus_mod.load_corpus(corpus_path)
    semantifier = train_semantifier(c, k, seed)
    semantifier.save(out)
    click.echo(f"snapshot k={k} seed={seed} -> {out}")


# -- baseline ---------------------------------------------------------------


@main.group()
def baseline():
    """Most-frequent-statements baseline."""


@baseline.command("eval")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--top", default="10,20,30,40,50")
@click.option("--include-test", is_flag=True,
              help="build the frequency table over the whole corpus, test folds included")
@click.option("--folds", default=3, type=int)
@click.option("--seed", default=13, type=int)
@click.option("--out", type=click.Path(), default=None)
def baseline_eval_cmd(corpus_path, top, include_test, folds, seed, out):
    c = corpus_mod.load_corpus(corpus_path)
    splits = corpus_mod.make_folds(c, folds, seed)
    grid = {}
    for n in _parse_range(top):
        config = eval_mod.MethodConfig(method="naive", top_n=n, include_test=include_test, seed=seed)
        grid[n] = eval_mod.run_cv(c, config, splits).averaged
    csv_text = eval_mod.emit_naive_grid(grid)
    if out:
        Path(out).write_text(csv_text, encoding="utf-8")
    click.echo(csv_text, nl=False)


# -- eval -------------------------------------------------------------------


@main.group(name="eval")
def eval_group():
    """Cross-validation runs over the method/parameter grid."""


@eval_group.command("run")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--method", type=click.Choice(["naive", "cluster"]), required=True)
@click.option("--vectorizer", default="tfidf",
              help="'tfidf' or 'embedding:<file>' for precomputed dense vectors")
@click.option("--k-range", "k_range", default="450")
@click.option("--thresholds", default="1")
@click.option("--top", default="10,20,30,40,50", help="top-n grid for the naive method")
@click.option("--include-test", is_flag=True)
@click.option("--folds", default=3, type=int)
@click.option("--seed", default=13, type=int)
@click.option("--out", type=click.Path(), default=None)
def eval_run_cmd(corpus_path, method, vectorizer, k_range, thresholds, top,
                 include_test, folds, seed, out):
    c = corpus_mod.load_corpus(corpus_path)
    splits = corpus_mod.make_folds(c, folds, seed)
    embedding_path = None
    vec_kind = vectorizer
    if vectorizer.startswith("embedding:"):
        vec_kind, embedding_path = "embedding", vectorizer.split(":", 1)[1]
    results = []
    if method == "naive":
        for n in _parse_range(top):
            config = eval_mod.MethodConfig(
                method="naive", top_n=n, include_test=include_test, seed=seed
            )
            results.append(eval_mod.run_cv(c, config, splits))
    else:
        for k in _parse_range(k_range):
            for t in _parse_range(thresholds):
                config = eval_mod.MethodConfig(
                    method="cluster", vectorizer=vec_kind, embedding_path=embedding_path,
                    k=k, threshold=t, seed=seed,
                )
                results.append(eval_mod.run_cv(c, config, splits))
    csv_text = eval_mod.reports_to_csv(results)
    if out:
        Path(out).write_text(csv_text, encoding="utf-8")
    click.echo(csv_text, nl=False)


# -- ingest -----------------------------------------------------------------


@main.command("ingest")
@click.option("--source", default="scripps")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--report", "report_path", type=click.Path(), default=None)
def ingest_cmd(source, in_path, out, report_path):
    """Parse a depositor response file into an unlabeled JSON-Lines corpus."""
    profile = ingest_mod.get_profile(source)
    depositor_records = ingest_mod.parse_depositor_file(in_path, profile)
    records, report = ingest_mod.to_bioassay_records(depositor_records, profile)
    corpus_mod.save_corpus(records, out)
    if report_path:
        Path(report_path).write_text(json.dumps(report.as_dict(), indent=2), encoding="utf-8")
    click.echo(f"extracted {report.extracted}/{report.total}; "
               f"{len(report.unparseable)} unparseable")


# -- serve ------------------------------------------------------------------


@main.command("serve")
@click.option("--model", "model_path", type=click.Path(exists=True), default=None)
@click.option("--store", "store_path", type=click.Path(), default="graph_store.json")
@click.option("--addr", default="127.0.0.1:8000")
@click.option("--pubmed-fixtures", type=click.Path(exists=True), default=None)
def serve_cmd(model_path, store_path, addr, pubmed_fixtures):
    """Run the HTTP curation service."""
    import uvicorn

    from assaysem.graph import GraphStore
    from assaysem.service import AppState, PubmedClient, create_app

    state = AppState(
        store=GraphStore(store_path),
        semantifier=Semantifier.load(model_path) if model_path else None,
        pubmed=PubmedClient(pubmed_fixtures),
    )
    host, port = addr.rsplit(":", 1)
    uvicorn.run(create_app(state), host=host, port=int(port))


if __name__ == "__main__":
    main()
