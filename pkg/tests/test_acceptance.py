"""Acceptance suite: one test per criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
pass/fail lines; any failure also fails the pytest run.
"""

import functools
import random
import time

import numpy as np
import pytest
from scipy import stats as scipy_stats

from blogrank.evaluation import success_index, t_test
from blogrank.graph import (
    EdgeBundle,
    GraphConfig,
    WeblogGraph,
    aggregate,
    compute_similarity,
    graph_stats,
)
from blogrank.ingest import load_corpus
from blogrank.ranker import (
    RankConfig,
    build_transitions,
    edge_weight,
    preset,
    rank,
    top_k,
)
from blogrank.search import result_sort_key
from blogrank.synth import gen_synthetic


def report(number, description):
    def decorator(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE {number}: FAIL - {description}", flush=True)
                raise
            print(f"ACCEPTANCE {number}: PASS - {description}", flush=True)

        return wrapper

    return decorator


def np_random_graph(rng: np.random.Generator, n, mean_degree=4.0,
                    enhanced=True, dangling_free=False, skewed=False):
    """Random weblog graph built straight from index arrays. `skewed` biases
    in-links toward low-index nodes so scores spread out."""
    n_edges = max(1, int(n * mean_degree))
    src = rng.integers(0, n, n_edges)
    if skewed:
        dst = (n * rng.random(n_edges) ** 3).astype(np.int64)
    else:
        dst = rng.integers(0, n, n_edges)
    keep = src != dst
    src, dst = src[keep], dst[keep]
    packed = np.unique(src * n + dst)
    src, dst = packed // n, packed % n
    m = len(src)
    if dangling_free:
        missing = np.setdiff1d(np.arange(n), src)
        if len(missing):
            extra_dst = (missing + 1) % n
            src = np.concatenate([src, missing])
            dst = np.concatenate([dst, extra_dst])
            m = len(src)
    L = rng.integers(1, 4, m)
    if enhanced:
        implicit = rng.random(m) < 0.3
        L[implicit] = 0
        T = rng.integers(0, 5, m)
        U = rng.integers(0, 3, m)
        N = rng.integers(0, 3, m)
        T[implicit] = np.maximum(T[implicit], 3)  # implicit edges meet a threshold
    else:
        T = U = N = np.zeros(m, dtype=np.int64)
    ids = [f"w{i:06d}" for i in range(n)]
    return WeblogGraph(ids, np.ones(n, dtype=np.int64),
                       src.astype(np.int64), dst.astype(np.int64),
                       L.astype(np.int64), np.asarray(T, dtype=np.int64),
                       np.asarray(U, dtype=np.int64), np.asarray(N, dtype=np.int64))


def row_sums(graph, cfg):
    tr = build_transitions(graph, cfg)
    sums = np.bincount(tr.src, weights=tr.fn, minlength=graph.n_nodes)
    has_row = np.bincount(tr.src, minlength=graph.n_nodes) > 0
    return sums[has_row]


@report(1, "edge weight worked example (3,1,1,1) x (2,1,3) -> F = 9 exactly")
def test_criterion_1_edge_weight_worked_example():
    bundle = EdgeBundle("bottom", "top", L=3, T=1, U=1, N=1)
    assert edge_weight(bundle, preset("blogrank")) == 9.0


@report(2, "Success Index worked examples")
def test_criterion_2_success_index_worked_examples():
    assert success_index([2, 10]) == pytest.approx(0.275, abs=1e-12)
    assert success_index([10, 2]) == pytest.approx(0.175, abs=1e-12)
    a, b = success_index([2, 1, 3]), success_index([1, 2, 3, 4])
    assert a == pytest.approx(0.42593, abs=1e-4)
    assert b == pytest.approx(0.40104, abs=1e-4)
    assert a > b


@report(3, "row stochasticity: 1000 random graphs x 3 presets, 1e-12")
def test_criterion_3_row_stochasticity():
    rng = np.random.default_rng(303)
    for _ in range(1000):
        g = np_random_graph(rng, int(rng.integers(2, 51)))
        for method in ("pagerank", "xrank", "blogrank"):
            sums = row_sums(g, preset(method))
            assert np.all(np.abs(sums - 1.0) <= 1e-12)


def dense_pagerank_oracle(adj: np.ndarray, damping: float) -> np.ndarray:
    """Independent dense power iteration: teleport constant (1 - E), uniform
    split over out-links. Requires every node to have an out-link."""
    n = adj.shape[0]
    out = adj.sum(axis=1)
    assert np.all(out > 0)
    P = adj / out[:, None]
    b = np.ones(n)
    for _ in range(10000):
        nb = (1.0 - damping) + damping * (P.T @ b)
        if np.abs(nb - b).sum() < 1e-13:
            return nb
        b = nb
    return b


@report(4, "PageRank oracle equivalence on 100 dangling-free random graphs")
def test_criterion_4_pagerank_oracle():
    rng = np.random.default_rng(404)
    for trial in range(100):
        n = int(rng.integers(3, 101))
        g = np_random_graph(rng, n, enhanced=False, dangling_free=True)
        adj = np.zeros((n, n))
        adj[g.src, g.dst] = 1.0  # binary mode collapses multiplicity
        expected = dense_pagerank_oracle(adj, 0.85)
        v = rank(g, preset("pagerank"))
        assert v.converged
        assert np.max(np.abs(v.values - expected)) < 1e-8
        # criterion 5 companion: mass conservation on these fixtures
        assert abs(v.values.sum() - n) <= v.residual * n


@report(5, "mass conservation on converged runs incl. dangling graphs")
def test_criterion_5_mass_conservation():
    rng = np.random.default_rng(505)
    for _ in range(50):
        n = int(rng.integers(2, 60))
        g = np_random_graph(rng, n)  # dangling nodes allowed
        for method in ("pagerank", "xrank", "blogrank"):
            cfg = preset(method)
            v = rank(g, cfg)
            assert v.converged
            assert abs(v.values.sum() - n) <= cfg.epsilon * n


@report(6, "symmetric k-cycle fixed point = 1.0 for k in {3,10,1000}")
def test_criterion_6_cycle_fixed_point():
    for k in (3, 10, 1000):
        ids = {f"n{i:04d}": 1 for i in range(k)}
        edges = [
            (f"n{i:04d}", f"n{(i + 1) % k:04d}", 1, 0, 0, 0) for i in range(k)
        ]
        g = WeblogGraph.from_edges(ids, edges)
        for e in (0.5, 0.85, 0.99):
            v = rank(g, RankConfig(damping=e, link_mode="binary"))
            assert np.all(np.abs(v.values - 1.0) <= 1e-10)


@report(7, "weight scaling by 7 leaves transitions and top-k bit-identical")
def test_criterion_7_weight_scaling_invariance():
    rng = np.random.default_rng(707)
    base = preset("blogrank")
    scaled = RankConfig(
        w_tags=base.w_tags * 7, w_authors=base.w_authors * 7,
        w_news=base.w_news * 7, link_mode="count", include_implicit=True,
        link_scale=7.0,
    )
    for _ in range(20):
        g = np_random_graph(rng, int(rng.integers(3, 40)))
        ta = build_transitions(g, base)
        tb = build_transitions(g, scaled)
        assert np.array_equal(ta.src, tb.src)
        assert np.array_equal(ta.dst, tb.dst)
        assert np.array_equal(ta.fn, tb.fn)  # bit-identical probabilities
        assert top_k(rank(g, base), 10) == top_k(rank(g, scaled), 10)


@report(8, "densification: enhanced graph never sparser than hyperlink-only")
def test_criterion_8_densification_direction(tmp_path):
    for seed in (1, 2, 3):
        path = gen_synthetic(
            tmp_path / f"synth{seed}.jsonl", seed=seed, n_weblogs=12,
            n_posts=150, tag_density=3.0, author_density=1.0, news_density=1.0,
        )
        corpus, _ = load_corpus(path)
        base = aggregate(corpus)
        enhanced = compute_similarity(base, corpus, GraphConfig())
        assert (
            graph_stats(enhanced)["edges_per_node"]
            >= graph_stats(base)["edges_per_node"]
        )


@report(9, "search comparator matches a brute-force sort oracle, 10k cases")
def test_criterion_9_search_comparator_oracle():
    rng = random.Random(909)

    def compare(p, q):
        # explicit pairwise restatement of: score desc, recency desc, URL asc
        if p[0] != q[0]:
            return -1 if p[0] > q[0] else 1
        if p[1] != q[1]:
            return -1 if p[1] > q[1] else 1
        if p[2] != q[2]:
            return -1 if p[2] < q[2] else 1
        return 0

    rows = [
        (
            rng.choice([0.5, 1.0, 2.0, 2.0, 3.0]),
            rng.randrange(0, 8),
            f"http://w{rng.randrange(2000)}.example/p{rng.randrange(5)}",
        )
        for _ in range(10_000)
    ]
    ours = sorted(rows, key=lambda r: result_sort_key(*r))
    oracle = sorted(rows, key=functools.cmp_to_key(compare))
    assert ours == oracle


@report(10, "t-test sanity: identical, shifted, and scipy-checked cases")
def test_criterion_10_t_test_sanity():
    assert t_test([1, 2, 3], [1, 2, 3]).p == pytest.approx(1.0)
    a10 = [float(i) for i in range(1, 11)]
    assert t_test(a10, [x + 10 for x in a10]).p < 1e-6
    a = [0.31, 0.42, 0.18, 0.55, 0.47, 0.29, 0.61, 0.38, 0.44, 0.52]
    b = [0.12, 0.25, 0.31, 0.09, 0.22, 0.18, 0.27, 0.15, 0.21, 0.3]
    res = t_test(a, b)
    ref = scipy_stats.ttest_ind(a, b, equal_var=False)
    assert res.t == pytest.approx(ref.statistic, abs=1e-6)
    assert res.p == pytest.approx(ref.pvalue, abs=1e-4)


@report(11, "scale: 100k nodes / ~3M edges converges < 60 s, ratio <= 2x")
def test_criterion_11_scale_and_runtime():
    rng = np.random.default_rng(1111)
    n = 100_000
    g = np_random_graph(rng, n, mean_degree=30.0, skewed=True)
    assert g.n_edges > 2_500_000

    t0 = time.perf_counter()
    v_blog = rank(g, preset("blogrank"))
    blogrank_secs = time.perf_counter() - t0
    assert v_blog.converged
    assert blogrank_secs < 60.0

    t0 = time.perf_counter()
    v_pr = rank(g, preset("pagerank"))
    pagerank_secs = time.perf_counter() - t0
    assert v_pr.converged
    assert blogrank_secs <= 2.0 * pagerank_secs, (
        f"blogrank {blogrank_secs:.1f}s vs pagerank {pagerank_secs:.1f}s"
    )
