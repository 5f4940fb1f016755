"""Seeded synthetic corpus generator for tests and demos.

Defaults echo a sparse post graph (about 0.27 outgoing post links per
post) with modest tag/author/news overlap between weblogs.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

_WORDS = (
    "media politics music travel science coffee network election camera "
    "review festival economy privacy software garden recipe climate game "
    "startup protest satellite novel podcast league market museum"
).split()


def gen_synthetic(
    path: str | Path,
    seed: int = 0,
    n_weblogs: int = 20,
    n_posts: int = 200,
    link_density: float = 0.27,
    tag_density: float = 2.0,
    author_density: float = 1.0,
    news_density: float = 0.3,
) -> Path:
    """Write a deterministic JSONL corpus and return its path.

    Densities are expected counts per post: outgoing post links, tags,
    authors (0 allows anonymous posts) and news links.
    """
    if n_weblogs < 1 or n_posts < 1:
        raise ValueError("sizes must be positive")
    rng = random.Random(seed)
    n_tags = max(5, n_weblogs)
    n_authors = max(5, n_weblogs)
    n_news = max(5, n_posts // 5)
    permalinks = []
    for j in range(n_posts):
        w = j % n_weblogs
        permalinks.append(f"http://blog{w}.example.net/posts/{j}")

    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for j, permalink in enumerate(permalinks):
            rec: dict = {"permalink": permalink}
            if rng.random() < min(author_density, 1.0):
                rec["author"] = f"author{rng.randrange(n_authors)}"
            day = rng.randrange(365)
            rec["ts"] = (
                f"2006-{1 + day // 31:02d}-{1 + day % 28:02d}"
                f"T{rng.randrange(24):02d}:{rng.randrange(60):02d}:00+00:00"
            )
            n_t = _poisson(rng, tag_density)
            if n_t:
                rec["tags"] = sorted(
                    {f"tag{rng.randrange(n_tags)}" for _ in range(n_t)}
                )
            n_l = _poisson(rng, link_density)
            if n_l:
                links = set()
                for _ in range(n_l):
                    target = rng.randrange(len(permalinks))
                    if target != j:
                        links.add(permalinks[target])
                if links:
                    rec["post_links"] = sorted(links)
            n_n = _poisson(rng, news_density)
            if n_n:
                rec["news_links"] = sorted(
                    {
                        f"http://news.example.org/story/{rng.randrange(n_news)}"
                        for _ in range(n_n)
                    }
                )
            rec["content"] = " ".join(
                rng.choice(_WORDS) for _ in range(12)
            )
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    return path


def _poisson(rng: random.Random, lam: float) -> int:
    """Knuth's method; lam is small everywhere we use it."""
    if lam <= 0:
        return 0
    L = pow(2.718281828459045, -lam)
    k, p = 0, 1.0
    while True:
        p *= rng.random()
        if p <= L:
            return k
        k += 1
