"""Command line interface.

Verbs: ingest, rank, match, recommend, eval, export, serve, demo. Run
``guiscout <verb> --help`` for the options of each.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .corpus import FilterRules, filter_corpus, load_corpus, write_corpus
from .embedding import EmbeddingProviderConfig, create_embedder, embed_corpus
from .errors import GuiScoutError
from .feature_match import FeatureQuery, rank_aspect_guis
from .fixtures import demo_corpus, write_demo_llm_script
from .metrics import evaluate_run
from .ranking import RankingConfig, rank_guis
from .service import ServiceSettings
from .session import SessionStore, build_artifact, summary_markdown


@click.group()
def main():
    """Rank GUIs against natural-language requirements and elicit features."""


def _load_filtered(corpus_dir, exclude_flags, min_components, languages):
    index = load_corpus(corpus_dir)
    rules = FilterRules(
        exclude_flags=frozenset(f for f in exclude_flags.split(",") if f),
        min_components=min_components,
        language_tags=(
            frozenset(l for l in languages.split(",") if l) if languages else None
        ),
    )
    if rules.is_empty():
        return index, None
    filtered, report = filter_corpus(index, rules)
    return filtered, report


corpus_option = click.option(
    "--corpus", required=True, type=click.Path(exists=True, file_okay=False),
    help="Corpus directory of <gui_id>.json files.",
)
flags_option = click.option(
    "--exclude-flags", default="", show_default=True,
    help="Comma-separated filter flags to drop (e.g. opened_menu).",
)
min_components_option = click.option(
    "--min-components", default=None, type=int, help="Drop GUIs with fewer components."
)
languages_option = click.option(
    "--languages", default="", help="Comma-separated language tags to keep."
)


@main.command()
@corpus_option
@flags_option
@min_components_option
@languages_option
@click.option("--cache", default=None, type=click.Path(), help="Embedding cache file.")
@click.option("--dim", default=256, show_default=True, help="Embedding dimension.")
def ingest(corpus, exclude_flags, min_components, languages, cache, dim):
    """Load, validate, filter, and embed a corpus; print the filter report."""
    index, report = _load_filtered(corpus, exclude_flags, min_components, languages)
    click.echo(f"loaded {index.count_total} records, {len(index.errors)} invalid")
    for error in index.errors:
        click.echo(f"  invalid: {error.source}: {error.reason}")
    if report is not None:
        click.echo(f"filtered {report.removed_count} GUIs:")
        for name, count in sorted(report.per_filter_counts.items()):
            click.echo(f"  {name}: {count}")
        for gui_id, reasons in report.removed:
            click.echo(f"  removed {gui_id} ({', '.join(reasons)})")
    click.echo(f"{len(index)} GUIs in index")
    config = EmbeddingProviderConfig(dim=dim)
    embedding_cache = embed_corpus(index, create_embedder(config), config, cache)
    click.echo(
        f"embedded {embedding_cache.computed_count} texts"
        + (f" (cache: {cache})" if cache else "")
    )


@main.command()
@corpus_option
@click.option("--query", required=True, help="Natural-language GUI requirement.")
@click.option("--top-k", default=30, show_default=True)
@click.option("--alpha", default=0.5, show_default=True)
@flags_option
@min_components_option
@languages_option
def rank(corpus, query, top_k, alpha, exclude_flags, min_components, languages):
    """Rank corpus GUIs against a query; print the top-k table."""
    index, _ = _load_filtered(corpus, exclude_flags, min_components, languages)
    cfg = RankingConfig(alpha=alpha, top_k=top_k)
    ranking = rank_guis(query, index, cfg, create_embedder(EmbeddingProviderConfig()))
    click.echo(f"{'rank':>4}  {'gui_id':<24} {'ensemble':>9} {'s1':>7} {'s2':>7}")
    for entry in ranking:
        s2 = f"{entry.s2:.4f}" if entry.s2 is not None else "   -"
        click.echo(
            f"{entry.rank:>4}  {entry.gui_id:<24} {entry.ensemble:>9.4f}"
            f" {entry.s1:>7.4f} {s2:>7}"
        )


@main.command()
@corpus_option
@click.option("--query", required=True, help="GUI requirement giving the top-k context.")
@click.option("--feature", required=True, help="Feature requirement to match.")
@click.option("--top-k", default=30, show_default=True)
@click.option("--k-aspect", default=15, show_default=True)
def match(corpus, query, feature, top_k, k_aspect):
    """Match a feature against the top-k GUIs; print the aspect table."""
    index = load_corpus(corpus)
    embedder = create_embedder(EmbeddingProviderConfig())
    ranking = rank_guis(query, index, RankingConfig(top_k=top_k), embedder)
    aspects = rank_aspect_guis(
        FeatureQuery(feature_id="cli", text=feature), ranking, index, embedder, k_aspect
    )
    click.echo(f"{'rank':>4}  {'gui_id':<24} {'component':<20} {'score':>7}")
    for i, aspect in enumerate(aspects, start=1):
        click.echo(
            f"{i:>4}  {aspect.gui_id:<24} {str(aspect.component_id):<20}"
            f" {aspect.gui_score:>7.4f}"
        )


@main.command()
@click.option("--session", "session_id", required=True)
@click.option("--store", required=True, type=click.Path(exists=True, file_okay=False))
@corpus_option
@click.option("--llm-script", required=True, type=click.Path(exists=True, dir_okay=False))
def recommend(session_id, store, corpus, llm_script):
    """Run feature recommendation for a stored session's active slot."""
    from .service import ServiceSettings, build_engine

    settings = ServiceSettings(
        corpus_dir=corpus, sessions_dir=store, llm_script_path=llm_script
    )
    engine, _ = build_engine(settings)
    state = engine.store.load(session_id)
    if state.active_slot_index is None:
        raise click.ClickException("session has no active slot")
    recommendations = engine.request_recommendations(state, state.active_slot_index)
    click.echo(f"{'#':>3}  {'coverage':>8}  feature")
    for i, rec in enumerate(recommendations, start=1):
        click.echo(f"{i:>3}  {rec.coverage_score:>8.4f}  {rec.feature.text}")
        if rec.explanation:
            click.echo(f"     {rec.explanation}")


@main.command(name="eval")
@click.option(
    "--annotations", required=True, type=click.Path(exists=True, dir_okay=False),
    help="JSON-lines annotation file.",
)
@click.option("--out", default="metrics.json", show_default=True, type=click.Path())
@click.option("--ks", default="1,5,10,15", show_default=True)
def eval_command(annotations, out, ks):
    """Compute MAP/MRR/P@k/HITS@k over an annotation file."""
    report = evaluate_run(annotations, ks=[int(k) for k in ks.split(",")])
    click.echo(report.to_table())
    Path(out).write_bytes(report.to_json_bytes())
    click.echo(f"report written to {out}")


@main.command()
@click.option("--session", "session_id", required=True)
@click.option("--store", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out-dir", default=".", show_default=True, type=click.Path())
def export(session_id, store, out_dir):
    """Export a session's prototype artifact (artifact.json + summary.md)."""
    state = SessionStore(store).load(session_id)
    artifact = build_artifact(state)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "artifact.json").write_bytes(artifact.to_json_bytes())
    (out / "summary.md").write_text(summary_markdown(artifact), encoding="utf-8")
    click.echo(f"exported {len(artifact.slots)} slot(s) to {out}/artifact.json")


@main.command()
@corpus_option
@click.option("--sessions", default="./sessions", show_default=True, type=click.Path())
@click.option("--llm-script", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--llm-endpoint", default=None)
@click.option("--static", default=None, type=click.Path(file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@flags_option
@min_components_option
def serve(corpus, sessions, llm_script, llm_endpoint, static, host, port,
          exclude_flags, min_components):
    """Serve the HTTP API (and the web UI when --static points at a build)."""
    from .service import serve as run_service

    settings = ServiceSettings(
        corpus_dir=corpus,
        sessions_dir=sessions,
        llm_script_path=llm_script,
        llm_endpoint=llm_endpoint,
        static_dir=static,
        exclude_flags=tuple(f for f in exclude_flags.split(",") if f),
        min_components=min_components,
    )
    run_service(settings, host=host, port=port)


@main.command()
@click.option("--out", default="./demo", show_default=True, type=click.Path())
def demo(out):
    """Materialize the built-in demo corpus and scripted LLM responses."""
    out_path = Path(out)
    write_corpus(out_path / "corpus", demo_corpus())
    write_demo_llm_script(out_path / "llm_script.json")
    click.echo(f"demo corpus (60 GUIs) written to {out_path / 'corpus'}")
    click.echo(f"scripted LLM responses written to {out_path / 'llm_script.json'}")


def run() -> int:
    try:
        main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.Abort:
        return 130
    except GuiScoutError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(run())
