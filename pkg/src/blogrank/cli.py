"""Command-line entry point wiring ingest -> graph -> rank -> search/serve -> eval."""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from . import evaluation, graph as graph_mod, ingest, ranker, search as search_mod
from .synth import gen_synthetic


def _load_config(ctx, param, value):
    """--config <file>: JSON object whose keys are flag names, used as
    defaults for every subcommand."""
    if not value:
        return None
    cfg = json.loads(Path(value).read_text(encoding="utf-8"))
    if not isinstance(cfg, dict):
        raise click.BadParameter("config file must hold a JSON object")
    default_map = {}
    for name, cmd in main.commands.items():
        per_cmd = {}
        for param in cmd.params:
            for opt in param.opts:
                key = opt.lstrip("-")
                if key in cfg:
                    per_cmd[param.name] = cfg[key]
        if per_cmd:
            default_map[name] = per_cmd
    ctx.default_map = default_map
    return value


@click.group()
@click.option(
    "--config", type=click.Path(exists=True), callback=_load_config,
    expose_value=False, is_eager=True,
    help="JSON file of flag defaults (key = flag name).",
)
def main():
    """Weblog ranking engine."""


@main.command("ingest")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--host-patterns", type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def ingest_cmd(input_path, host_patterns, out):
    """Parse a JSONL post corpus into a canonical corpus snapshot."""
    patterns = ingest.load_host_patterns(host_patterns) if host_patterns else ()
    try:
        corpus, report = ingest.load_corpus(input_path, patterns)
    except ingest.IngestError as exc:
        raise click.ClickException(str(exc))
    ingest.save_corpus(corpus, out)
    click.echo(
        f"read={report.read} kept={report.kept} skipped={report.skipped} "
        f"(malformed={report.malformed} duplicates={report.duplicates})"
    )


@main.command("build-graph")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--min-tags", default=3, show_default=True)
@click.option("--min-authors", default=2, show_default=True)
@click.option("--min-coupling", default=2, show_default=True)
@click.option("--tag-df-min", default=1, show_default=True)
@click.option("--tag-df-max-fraction", default=1.0, show_default=True)
@click.option("--stoplist", type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def build_graph_cmd(
    corpus_path, min_tags, min_authors, min_coupling,
    tag_df_min, tag_df_max_fraction, stoplist, out,
):
    """Aggregate the post graph and add implicit similarity edges."""
    corpus, _ = ingest.load_corpus(corpus_path)
    stopset = graph_mod.DEFAULT_STOPLIST
    if stoplist:
        extra = {
            line.strip().lower()
            for line in Path(stoplist).read_text(encoding="utf-8").splitlines()
            if line.strip()
        }
        stopset = frozenset(stopset | extra)
    cfg = graph_mod.GraphConfig(
        min_tags=min_tags,
        min_authors=min_authors,
        min_coupling=min_coupling,
        tag_df_min=tag_df_min,
        tag_df_max_fraction=tag_df_max_fraction,
        author_stoplist=stopset,
    )
    base = graph_mod.aggregate(corpus)
    enhanced = graph_mod.compute_similarity(base, corpus, cfg)
    graph_mod.save_graph(enhanced, out)
    for label, g in (("hyperlink-only", base), ("enhanced", enhanced)):
        s = graph_mod.graph_stats(g)
        click.echo(
            f"{label}: nodes={s['nodes']} edges={s['edges']} "
            f"edges/node={s['edges_per_node']:.3f} "
            f"mean_in={s['mean_in_degree']:.3f} mean_out={s['mean_out_degree']:.3f}"
        )


def _rank_config(method, wt, wu, wn, damping, epsilon, max_iters):
    cfg = ranker.preset(method)
    overrides = dict(damping=damping, epsilon=epsilon, max_iters=max_iters)
    if ranker.METHOD_ALIASES[method.lower()] == "blogrank":
        overrides.update(w_tags=wt, w_authors=wu, w_news=wn)
    return replace(cfg, **overrides)


@main.command("rank")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option(
    "--method", default="blogrank", show_default=True,
    type=click.Choice(sorted(ranker.METHOD_ALIASES), case_sensitive=False),
)
@click.option("--wt", default=2.0, show_default=True)
@click.option("--wu", default=1.0, show_default=True)
@click.option("--wn", default=3.0, show_default=True)
@click.option("--damping", default=0.85, show_default=True)
@click.option("--epsilon", default=1e-8, show_default=True)
@click.option("--max-iters", default=200, show_default=True)
@click.option("--out", required=True, type=click.Path())
def rank_cmd(graph_path, method, wt, wu, wn, damping, epsilon, max_iters, out):
    """Compute scores by power iteration and write a ranks TSV."""
    try:
        g = graph_mod.load_graph(graph_path)
    except ValueError as exc:
        raise click.ClickException(f"cannot parse graph: {exc}")
    cfg = _rank_config(method, wt, wu, wn, damping, epsilon, max_iters)
    vector = ranker.rank(g, cfg)
    ranker.save_ranks(vector, out)
    status = "converged" if vector.converged else "NOT converged"
    click.echo(
        f"{status} in {vector.iterations} iterations, residual={vector.residual:.3e}"
    )
    if not vector.converged:
        sys.exit(3)


@main.command("top")
@click.option("--ranks", "ranks_path", required=True, type=click.Path(exists=True))
@click.option("-k", default=10, show_default=True)
def top_cmd(ranks_path, k):
    """Print the k best-ranked weblogs."""
    vector = ranker.load_ranks(ranks_path)
    for w, s in ranker.top_k(vector, k):
        click.echo(f"{w}\t{s:.6f}")


@main.command("overlap")
@click.option("--a", "a_path", required=True, type=click.Path(exists=True))
@click.option("--b", "b_path", required=True, type=click.Path(exists=True))
@click.option("-k", default=1000, show_default=True)
def overlap_cmd(a_path, b_path, k):
    """Common weblogs in the top-k of two rankings."""
    a = ranker.load_ranks(a_path)
    b = ranker.load_ranks(b_path)
    try:
        count, fraction = ranker.overlap_at_k(a, b, k)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"common={count} fraction={fraction:.4f}")


@main.command("news-influence")
@click.option("--graph", "graph_path", type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--ranks", "ranks_path", required=True, type=click.Path(exists=True))
@click.option("-k", default=20, show_default=True)
def news_influence_cmd(graph_path, corpus_path, ranks_path, k):
    """Rank news URLs by the summed score of the weblogs citing them."""
    corpus, _ = ingest.load_corpus(corpus_path)
    vector = ranker.load_ranks(ranks_path)
    for url, score in ranker.rank_news_influence(corpus, vector)[:k]:
        click.echo(f"{url}\t{score:.6f}")


@main.command("build-index")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def build_index_cmd(corpus_path, out):
    """Build the inverted text index from a corpus snapshot."""
    corpus, _ = ingest.load_corpus(corpus_path)
    index = search_mod.build_index(corpus)
    index.save(out)
    click.echo(f"indexed {len(index.posts)} posts, {len(index.postings)} terms")


@main.command("search")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--ranks", "ranks_path", required=True, type=click.Path(exists=True))
@click.option("--query", required=True)
@click.option("--limit", default=1000, show_default=True)
def search_cmd(index_path, ranks_path, query, limit):
    """Search posts; results are ordered by their weblog's rank."""
    index = search_mod.SearchIndex.load(index_path)
    vector = ranker.load_ranks(ranks_path)
    try:
        results = search_mod.search(index, query, vector, limit)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    for r in results:
        click.echo(f"{r.position}\t{r.permalink}\t{r.weblog_id}\t{r.score:.4f}")


@main.group("eval")
def eval_group():
    """Click-log evaluation."""


@eval_group.command("si")
@click.option("--clicks", "clicks_path", required=True, type=click.Path(exists=True))
def eval_si_cmd(clicks_path):
    """Per-method Success Index summary."""
    sessions = evaluation.load_click_log(clicks_path)
    report = evaluation.aggregate_si(sessions)
    out = {
        "methods": {
            m: {"count": s.count, "mean_si": s.mean_si, "std_si": s.std_si}
            for m, s in report.methods.items()
        },
        "excluded": report.excluded,
    }
    click.echo(json.dumps(out, indent=2, sort_keys=True))


@eval_group.command("ttest")
@click.option("--clicks", "clicks_path", required=True, type=click.Path(exists=True))
@click.option("--a", "method_a", required=True)
@click.option("--b", "method_b", required=True)
def eval_ttest_cmd(clicks_path, method_a, method_b):
    """Welch t-test between two methods' SI distributions."""
    sessions = evaluation.load_click_log(clicks_path)
    report = evaluation.aggregate_si(sessions)
    try:
        a = report.methods[evaluation.canonical_method(method_a)].values
        b = report.methods[evaluation.canonical_method(method_b)].values
    except KeyError as exc:
        raise click.ClickException(f"no sessions for method {exc}")
    try:
        res = evaluation.t_test(a, b)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(
        json.dumps(
            {"t": res.t, "df": res.df, "p_two_tailed": res.p,
             "p_one_tailed": res.p / 2.0},
            indent=2, sort_keys=True,
        )
    )


@main.command("gen")
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True)
@click.option("--n-weblogs", default=20, show_default=True)
@click.option("--n-posts", default=200, show_default=True)
@click.option("--link-density", default=0.27, show_default=True)
@click.option("--tag-density", default=2.0, show_default=True)
@click.option("--author-density", default=1.0, show_default=True)
@click.option("--news-density", default=0.3, show_default=True)
def gen_cmd(out, seed, n_weblogs, n_posts, link_density, tag_density,
            author_density, news_density):
    """Generate a deterministic synthetic corpus."""
    gen_synthetic(
        out, seed=seed, n_weblogs=n_weblogs, n_posts=n_posts,
        link_density=link_density, tag_density=tag_density,
        author_density=author_density, news_density=news_density,
    )
    click.echo(f"wrote {out}")


@main.command("serve")
@click.option("--index", "index_path", required=True, type=click.Path(exists=True))
@click.option("--ranks-pagerank", required=True, type=click.Path(exists=True))
@click.option("--ranks-xrank", required=True, type=click.Path(exists=True))
@click.option("--ranks-blogrank", required=True, type=click.Path(exists=True))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--log", "log_path", required=True, type=click.Path())
@click.option("--static-dir", type=click.Path(exists=True))
@click.option("--limit", default=1000, show_default=True)
def serve_cmd(index_path, ranks_pagerank, ranks_xrank, ranks_blogrank,
              port, host, seed, log_path, static_dir, limit):
    """Run the blind-evaluation HTTP service."""
    import uvicorn

    from .service import ServiceState, create_app

    state = ServiceState(
        index=search_mod.SearchIndex.load(index_path),
        ranks={
            "pagerank": ranker.load_ranks(ranks_pagerank),
            "xrank": ranker.load_ranks(ranks_xrank),
            "blogrank": ranker.load_ranks(ranks_blogrank),
        },
        log_path=Path(log_path),
        seed=seed,
        limit=limit,
    )
    app = create_app(state, static_dir)
    uvicorn.run(app, host=host, port=port)


# --- pipeline -------------------------------------------------------------


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _stage_hash(*parts) -> str:
    return hashlib.sha256(json.dumps(parts, sort_keys=True).encode()).hexdigest()


@main.command("pipeline")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--workdir", required=True, type=click.Path())
@click.option("--host-patterns", type=click.Path(exists=True))
@click.option("--min-tags", default=3, show_default=True)
@click.option("--min-authors", default=2, show_default=True)
@click.option("--min-coupling", default=2, show_default=True)
@click.option("--tag-df-min", default=1, show_default=True)
@click.option("--damping", default=0.85, show_default=True)
@click.option("--epsilon", default=1e-8, show_default=True)
@click.option("--max-iters", default=200, show_default=True)
@click.pass_context
def pipeline_cmd(ctx, input_path, workdir, host_patterns, min_tags, min_authors,
                 min_coupling, tag_df_min, damping, epsilon, max_iters):
    """Run ingest, build-graph, rank (all three methods) and build-index,
    skipping stages whose inputs and config are unchanged."""
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    manifest_path = workdir / "manifest.json"
    manifest = (
        json.loads(manifest_path.read_text(encoding="utf-8"))
        if manifest_path.exists()
        else {}
    )
    corpus_out = workdir / "corpus.jsonl"
    graph_out = workdir / "graph.tsv"
    index_out = workdir / "index.json"
    rank_outs = {m: workdir / f"ranks_{m}.tsv" for m in ("pagerank", "xrank", "blogrank")}

    def run_stage(name, out_paths, stage_hash, runner):
        done = (
            manifest.get(name) == stage_hash
            and all(p.exists() for p in out_paths)
        )
        if done:
            click.echo(f"{name}: up to date")
            return
        click.echo(f"{name}: running")
        try:
            runner()
        except click.ClickException as exc:
            raise click.ClickException(f"stage {name} failed: {exc.message}")
        except SystemExit as exc:
            raise click.ClickException(f"stage {name} failed (exit {exc.code})")
        manifest[name] = stage_hash
        manifest_path.write_text(
            json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
        )

    input_hash = _sha256_file(Path(input_path))
    pat_hash = _sha256_file(Path(host_patterns)) if host_patterns else ""
    run_stage(
        "ingest", [corpus_out], _stage_hash("ingest", input_hash, pat_hash),
        lambda: ctx.invoke(
            ingest_cmd, input_path=input_path,
            host_patterns=host_patterns, out=str(corpus_out),
        ),
    )
    graph_cfg = [min_tags, min_authors, min_coupling, tag_df_min]
    run_stage(
        "build-graph", [graph_out],
        _stage_hash("build-graph", _sha256_file(corpus_out), graph_cfg),
        lambda: ctx.invoke(
            build_graph_cmd, corpus_path=str(corpus_out),
            min_tags=min_tags, min_authors=min_authors,
            min_coupling=min_coupling, tag_df_min=tag_df_min,
            tag_df_max_fraction=1.0, stoplist=None, out=str(graph_out),
        ),
    )
    rank_cfg = [damping, epsilon, max_iters]
    for method, out in rank_outs.items():
        run_stage(
            f"rank-{method}", [out],
            _stage_hash("rank", method, _sha256_file(graph_out), rank_cfg),
            lambda m=method, o=out: ctx.invoke(
                rank_cmd, graph_path=str(graph_out), method=m,
                wt=2.0, wu=1.0, wn=3.0, damping=damping,
                epsilon=epsilon, max_iters=max_iters, out=str(o),
            ),
        )
    run_stage(
        "build-index", [index_out],
        _stage_hash("build-index", _sha256_file(corpus_out)),
        lambda: ctx.invoke(
            build_index_cmd, corpus_path=str(corpus_out), out=str(index_out)
        ),
    )
    click.echo("pipeline complete")


if __name__ == "__main__":
    main()
