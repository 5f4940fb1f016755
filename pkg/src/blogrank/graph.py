"""Weblog graph: hyperlink aggregation and implicit similarity edges."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .ingest import Corpus, derive_weblog_id

DEFAULT_STOPLIST = frozenset({"admin", "webmaster", "john", "anonymous"})


@dataclass(frozen=True)
class EdgeBundle:
    src: str
    dst: str
    L: int  # hyperlink count src -> dst
    T: int  # distinct shared tags (symmetric)
    U: int  # distinct shared authors (symmetric)
    N: int  # distinct shared news URLs (symmetric)


@dataclass(frozen=True)
class WeblogNode:
    weblog_id: str
    post_count: int
    authors: frozenset[str]
    tags: frozenset[str]
    news: frozenset[str]
    out_degree: int


@dataclass(frozen=True)
class GraphConfig:
    min_tags: int = 3
    min_authors: int = 2
    min_coupling: int = 2
    tag_df_min: int = 1
    tag_df_max_fraction: float = 1.0
    author_stoplist: frozenset[str] = DEFAULT_STOPLIST

    def __post_init__(self):
        if min(self.min_tags, self.min_authors, self.min_coupling) < 1:
            raise ValueError("edge-creation thresholds must be >= 1")
        if not (0 < self.tag_df_max_fraction <= 1):
            raise ValueError("tag_df_max_fraction must be in (0, 1]")


class WeblogGraph:
    """Directed weblog graph with per-edge feature counts.

    Edges are held in parallel integer arrays so that multi-million-edge
    graphs stay cheap; EdgeBundle objects are materialized on demand.
    """

    def __init__(
        self,
        ids: list[str],
        post_counts: np.ndarray,
        src: np.ndarray,
        dst: np.ndarray,
        L: np.ndarray,
        T: np.ndarray,
        U: np.ndarray,
        N: np.ndarray,
        features: dict[str, tuple[frozenset, frozenset, frozenset]] | None = None,
    ):
        self.ids = ids
        self.idx = {w: i for i, w in enumerate(ids)}
        self.post_counts = post_counts
        self.src = src
        self.dst = dst
        self.L = L
        self.T = T
        self.U = U
        self.N = N
        # weblog_id -> (tags, authors, news); empty for zero-post nodes
        self.features = features or {}
        self.out_degrees = np.bincount(src, minlength=len(ids)).astype(np.int64)
        self.in_degrees = np.bincount(dst, minlength=len(ids)).astype(np.int64)
        self._pos: dict[tuple[int, int], int] | None = None

    @classmethod
    def from_edges(
        cls,
        nodes: dict[str, int],
        edges: list[tuple[str, str, int, int, int, int]],
        features=None,
    ) -> "WeblogGraph":
        """Build from {weblog_id: post_count} and (src, dst, L, T, U, N) rows."""
        ids = sorted(nodes)
        idx = {w: i for i, w in enumerate(ids)}
        post_counts = np.array([nodes[w] for w in ids], dtype=np.int64)
        cols = np.array(
            [(idx[s], idx[d], l, t, u, n) for s, d, l, t, u, n in edges],
            dtype=np.int64,
        ).reshape(-1, 6)
        return cls(
            ids, post_counts,
            cols[:, 0], cols[:, 1], cols[:, 2], cols[:, 3], cols[:, 4], cols[:, 5],
            features,
        )

    @property
    def n_nodes(self) -> int:
        return len(self.ids)

    @property
    def n_edges(self) -> int:
        return len(self.src)

    def _position_index(self) -> dict[tuple[int, int], int]:
        if self._pos is None:
            self._pos = {
                (int(s), int(d)): k
                for k, (s, d) in enumerate(zip(self.src, self.dst))
            }
        return self._pos

    def bundle(self, src: str, dst: str) -> EdgeBundle | None:
        si, di = self.idx.get(src), self.idx.get(dst)
        if si is None or di is None:
            return None
        k = self._position_index().get((si, di))
        if k is None:
            return None
        return self._bundle_at(k)

    def _bundle_at(self, k: int) -> EdgeBundle:
        return EdgeBundle(
            self.ids[self.src[k]], self.ids[self.dst[k]],
            int(self.L[k]), int(self.T[k]), int(self.U[k]), int(self.N[k]),
        )

    def bundles(self):
        for k in range(self.n_edges):
            yield self._bundle_at(k)

    def node(self, weblog_id: str) -> WeblogNode:
        i = self.idx[weblog_id]
        tags, authors, news = self.features.get(
            weblog_id, (frozenset(), frozenset(), frozenset())
        )
        return WeblogNode(
            weblog_id=weblog_id,
            post_count=int(self.post_counts[i]),
            authors=authors,
            tags=tags,
            news=news,
            out_degree=int(self.out_degrees[i]),
        )


def aggregate(corpus: Corpus) -> WeblogGraph:
    """Collapse the post graph onto weblogs: one node per weblog, L = number
    of post-level hyperlinks between the two weblogs. Link targets outside
    the corpus become zero-post nodes; self-links are dropped.
    """
    nodes: dict[str, int] = {w: len(ps) for w, ps in corpus.weblog_index.items()}
    link_counts: Counter[tuple[str, str]] = Counter()
    target_cache: dict[str, str] = dict(corpus.permalink_to_weblog)
    for post in corpus.posts:
        for target in post.post_links:
            tw = target_cache.get(target)
            if tw is None:
                tw = derive_weblog_id(target, corpus.host_patterns)
                target_cache[target] = tw
            if tw == post.weblog_id:
                continue
            nodes.setdefault(tw, 0)
            link_counts[(post.weblog_id, tw)] += 1

    features = {}
    for w, posts in corpus.weblog_index.items():
        tags: set[str] = set()
        authors: set[str] = set()
        news: set[str] = set()
        for p in posts:
            tags.update(p.tags)
            if p.author:
                authors.add(p.author)
            news.update(p.news_links)
        features[w] = (frozenset(tags), frozenset(authors), frozenset(news))

    edges = [
        (s, d, l, 0, 0, 0) for (s, d), l in sorted(link_counts.items())
    ]
    return WeblogGraph.from_edges(nodes, edges, features)


def _pair_counts(buckets: dict) -> Counter:
    """Count, per unordered node pair, how many feature values they share."""
    counts: Counter[tuple[int, int]] = Counter()
    for members in buckets.values():
        if len(members) < 2:
            continue
        for i, j in combinations(sorted(members), 2):
            counts[(i, j)] += 1
    return counts


def compute_similarity(
    graph: WeblogGraph, corpus: Corpus, cfg: GraphConfig
) -> WeblogGraph:
    """Enhance a hyperlink graph with implicit similarity edges.

    Shared-tag / shared-author / news-coupling counts are written on every
    existing edge regardless of thresholds; pairs without a hyperlink edge
    get a bidirectional edge pair only when at least one count meets its
    threshold. Tag document-frequency filtering and the author stoplist are
    applied before counting.
    """
    n_weblogs = max(len(corpus.weblog_index), 1)
    df_max = cfg.tag_df_max_fraction * n_weblogs
    stop = {a.lower() for a in cfg.author_stoplist}

    tag_buckets: dict[str, list[int]] = {}
    author_buckets: dict[str, list[int]] = {}
    news_buckets: dict[str, list[int]] = {}
    filtered_features = {}
    for w, (tags, authors, news) in graph.features.items():
        i = graph.idx[w]
        keep_tags = frozenset(
            t for t in tags
            if cfg.tag_df_min <= corpus.tag_df.get(t, 0) <= df_max
        )
        keep_authors = frozenset(a for a in authors if a.lower() not in stop)
        filtered_features[w] = (keep_tags, keep_authors, news)
        for t in keep_tags:
            tag_buckets.setdefault(t, []).append(i)
        for a in keep_authors:
            author_buckets.setdefault(a, []).append(i)
        for u in news:
            news_buckets.setdefault(u, []).append(i)

    t_counts = _pair_counts(tag_buckets)
    u_counts = _pair_counts(author_buckets)
    n_counts = _pair_counts(news_buckets)

    pos = {
        (int(s), int(d)): k for k, (s, d) in enumerate(zip(graph.src, graph.dst))
    }
    T = graph.T.copy()
    U = graph.U.copy()
    N = graph.N.copy()
    new_edges: list[tuple[int, int, int, int, int]] = []  # (src, dst, t, u, n)
    pairs = set(t_counts) | set(u_counts) | set(n_counts)
    for (i, j) in sorted(pairs):
        t = t_counts.get((i, j), 0)
        u = u_counts.get((i, j), 0)
        n = n_counts.get((i, j), 0)
        qualifies = (
            t >= cfg.min_tags or u >= cfg.min_authors or n >= cfg.min_coupling
        )
        for a, b in ((i, j), (j, i)):
            k = pos.get((a, b))
            if k is not None:
                T[k], U[k], N[k] = t, u, n
            elif qualifies:
                new_edges.append((a, b, t, u, n))

    src = np.concatenate([graph.src, np.array([e[0] for e in new_edges], dtype=np.int64)])
    dst = np.concatenate([graph.dst, np.array([e[1] for e in new_edges], dtype=np.int64)])
    L = np.concatenate([graph.L, np.zeros(len(new_edges), dtype=np.int64)])
    T = np.concatenate([T, np.array([e[2] for e in new_edges], dtype=np.int64)])
    U = np.concatenate([U, np.array([e[3] for e in new_edges], dtype=np.int64)])
    N = np.concatenate([N, np.array([e[4] for e in new_edges], dtype=np.int64)])
    return WeblogGraph(
        list(graph.ids), graph.post_counts.copy(),
        src, dst, L, T, U, N, filtered_features,
    )


def graph_stats(graph: WeblogGraph) -> dict:
    n = graph.n_nodes
    e = graph.n_edges
    return {
        "nodes": n,
        "edges": e,
        "edges_per_node": e / n if n else 0.0,
        "mean_in_degree": float(graph.in_degrees.mean()) if n else 0.0,
        "mean_out_degree": float(graph.out_degrees.mean()) if n else 0.0,
    }


def save_graph(graph: WeblogGraph, path: str | Path) -> None:
    """Write the edge TSV and the `.nodes` sidecar."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for k in range(graph.n_edges):
            fh.write(
                f"{graph.ids[graph.src[k]]}\t{graph.ids[graph.dst[k]]}\t"
                f"{graph.L[k]}\t{graph.T[k]}\t{graph.U[k]}\t{graph.N[k]}\n"
            )
    with open(path.with_name(path.name + ".nodes"), "w", encoding="utf-8") as fh:
        for i, w in enumerate(graph.ids):
            fh.write(f"{w}\t{graph.post_counts[i]}\t{graph.out_degrees[i]}\n")


def load_graph(path: str | Path) -> WeblogGraph:
    path = Path(path)
    nodes: dict[str, int] = {}
    sidecar = path.with_name(path.name + ".nodes")
    if not sidecar.exists():
        raise ValueError(f"missing node sidecar {sidecar}")
    for line in sidecar.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"bad node line in {sidecar}: {line!r}")
        nodes[parts[0]] = int(parts[1])
    edges = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 6:
            raise ValueError(f"bad edge line in {path}: {line!r}")
        s, d = parts[0], parts[1]
        nodes.setdefault(s, 0)
        nodes.setdefault(d, 0)
        edges.append((s, d, int(parts[2]), int(parts[3]), int(parts[4]), int(parts[5])))
    return WeblogGraph.from_edges(nodes, edges)
