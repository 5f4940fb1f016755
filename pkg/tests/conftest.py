import json
import random

import pytest

from blogrank.ingest import load_corpus


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


def fig1_records():
    """Two weblogs, 11 posts, 3 hyperlinks bottom->top, and exactly one
    shared tag, one shared author and one shared news URL."""
    top = [f"http://top.example/p{i}" for i in range(6)]
    bottom = [f"http://bottom.example/p{i}" for i in range(5)]
    records = []
    for i, pl in enumerate(top):
        records.append(
            {
                "permalink": pl,
                "author": "carol" if i == 0 else "alice",
                "ts": f"2006-03-{i + 1:02d}T12:00:00Z",
                "tags": ["shared", "topstuff"],
                "news_links": ["http://news.example.org/a"] if i == 0 else [],
                "content": f"top post {i} about gadgets",
            }
        )
    links = {0: [top[0]], 1: [top[0]], 2: [top[1]]}
    for i, pl in enumerate(bottom):
        records.append(
            {
                "permalink": pl,
                "author": "carol" if i == 0 else "bob",
                "ts": f"2006-04-{i + 1:02d}T12:00:00Z",
                "tags": ["shared", "bottomstuff"],
                "post_links": links.get(i, []),
                "news_links": ["http://news.example.org/a"] if i == 1 else [],
                "content": f"bottom post {i} about politics",
            }
        )
    return records


@pytest.fixture
def fig1_corpus(tmp_path):
    path = write_jsonl(tmp_path / "fig1.jsonl", fig1_records())
    corpus, report = load_corpus(path)
    assert report.kept == 11
    return corpus


def random_corpus_records(rng: random.Random, n_weblogs=8, n_posts=60):
    """Random cross-linked corpus for oracle recount tests."""
    permalinks = [
        f"http://w{j % n_weblogs}.example/p{j}" for j in range(n_posts)
    ]
    records = []
    for j, pl in enumerate(permalinks):
        links = set()
        for _ in range(rng.randrange(0, 3)):
            t = rng.randrange(n_posts)
            if t != j:
                links.add(permalinks[t])
        records.append(
            {
                "permalink": pl,
                "author": f"a{rng.randrange(6)}",
                "ts": f"2006-01-01T00:00:{rng.randrange(60):02d}Z",
                "tags": [f"t{rng.randrange(10)}" for _ in range(rng.randrange(4))],
                "post_links": sorted(links),
                "news_links": [
                    f"http://n.example/{rng.randrange(8)}"
                    for _ in range(rng.randrange(2))
                ],
                "content": f"post {j}",
            }
        )
    return records


@pytest.fixture
def random_corpus(tmp_path):
    rng = random.Random(7)
    path = write_jsonl(tmp_path / "rand.jsonl", random_corpus_records(rng))
    corpus, _ = load_corpus(path)
    return corpus
