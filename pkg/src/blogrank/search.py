"""Inverted index and rank-ordered post retrieval.

Retrieval is deliberately plain (AND over tokens): the interesting part is
the result ordering, which follows the rank of the post's weblog with
recency as the tie-break.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .ingest import Corpus
from .ranker import RankVector

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

SNIPPET_LEN = 200


def tokenize(text: str) -> list[str]:
    return [t.casefold() for t in _TOKEN_RE.findall(text)]


@dataclass(frozen=True)
class SearchResult:
    position: int
    permalink: str
    weblog_id: str
    score: float
    published_at: int
    snippet: str


@dataclass(frozen=True)
class _PostMeta:
    weblog_id: str
    published_at: int
    content: str


class SearchIndex:
    def __init__(self):
        self.postings: dict[str, set[str]] = {}
        self.posts: dict[str, _PostMeta] = {}

    def save(self, path: str | Path) -> None:
        doc = {
            "postings": {t: sorted(ps) for t, ps in self.postings.items()},
            "posts": {
                pl: [m.weblog_id, m.published_at, m.content]
                for pl, m in self.posts.items()
            },
        }
        Path(path).write_text(json.dumps(doc), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SearchIndex":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        index = cls()
        index.postings = {t: set(ps) for t, ps in doc["postings"].items()}
        index.posts = {
            pl: _PostMeta(w, ts, content)
            for pl, (w, ts, content) in doc["posts"].items()
        }
        return index


def build_index(corpus: Corpus) -> SearchIndex:
    """Index post content tokens; posts without content fall back to tags."""
    index = SearchIndex()
    for post in corpus.posts:
        if post.content:
            terms = set(tokenize(post.content))
        else:
            terms = {tok for tag in post.tags for tok in tokenize(tag)}
        for t in terms:
            index.postings.setdefault(t, set()).add(post.permalink)
        index.posts[post.permalink] = _PostMeta(
            post.weblog_id, post.published_at, post.content or ""
        )
    return index


def result_sort_key(score: float, published_at: int, permalink: str):
    """Final presentation order: weblog score desc, recency desc, URL asc."""
    return (-score, -published_at, permalink)


def _snippet(content: str, terms: list[str]) -> str:
    if not content:
        return ""
    folded = content.casefold()
    hit = min(
        (i for i in (folded.find(t) for t in terms) if i >= 0), default=0
    )
    start = max(0, hit - SNIPPET_LEN // 4)
    return content[start : start + SNIPPET_LEN]


def search(
    index: SearchIndex,
    query: str,
    ranks: RankVector,
    limit: int = 1000,
) -> list[SearchResult]:
    """AND-match the query terms, cap candidates, order by weblog rank.

    Candidates are capped at `limit` by recency before the final ordering,
    mirroring a first-stage retriever that returns the freshest matches.
    """
    terms = tokenize(query)
    if not terms:
        raise ValueError("empty query")
    if limit < 1:
        raise ValueError("limit must be >= 1")
    candidates: set[str] | None = None
    for t in terms:
        hits = index.postings.get(t, set())
        candidates = hits.copy() if candidates is None else candidates & hits
        if not candidates:
            return []
    assert candidates is not None
    # pre-cap order: all AND-candidates match every term, so the match-count
    # component is constant and recency decides
    pre = sorted(
        candidates,
        key=lambda pl: (-index.posts[pl].published_at, pl),
    )[:limit]
    scores = dict(zip(ranks.ids, ranks.values))
    ordered = sorted(
        pre,
        key=lambda pl: result_sort_key(
            float(scores.get(index.posts[pl].weblog_id, 0.0)),
            index.posts[pl].published_at,
            pl,
        ),
    )
    results = []
    for pos, pl in enumerate(ordered, 1):
        meta = index.posts[pl]
        results.append(
            SearchResult(
                position=pos,
                permalink=pl,
                weblog_id=meta.weblog_id,
                score=float(scores.get(meta.weblog_id, 0.0)),
                published_at=meta.published_at,
                snippet=_snippet(meta.content, terms),
            )
        )
    return results
