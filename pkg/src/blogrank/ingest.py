"""Corpus ingestion: URL normalization, weblog identity, JSONL loading."""

from __future__ import annotations

import fnmatch
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from urllib.parse import urlsplit

# Sentinel for posts without a timestamp: sorts below every real epoch,
# keeping recency tie-breaks total.
MISSING_TS = -(2**31)

SNAPSHOT_FORMAT = "blogrank-corpus"

_PCT_RE = re.compile(r"%[0-9a-fA-F]{2}")
_DEFAULT_PORTS = {"http": 80, "https": 443}


class MalformedURL(ValueError):
    """Raised when a URL cannot be normalized."""


class IngestError(RuntimeError):
    """Fatal ingest failure (unreadable file, corrupt input)."""


def _canonical_pct(s: str) -> str:
    return _PCT_RE.sub(lambda m: m.group(0).upper(), s)


def normalize_url(raw: str) -> str:
    """Canonicalize a URL: lowercase scheme/host, drop default port,
    trailing slash and fragment, keep the query, uppercase percent-escapes.

    Raises MalformedURL on anything unparseable or without scheme+host.
    """
    if raw is None or not raw.strip():
        raise MalformedURL("empty URL")
    raw = raw.strip()
    try:
        parts = urlsplit(raw)
        port = parts.port  # raises ValueError on junk ports
    except ValueError as exc:
        raise MalformedURL(f"unparseable URL {raw!r}: {exc}") from None
    scheme = parts.scheme.lower()
    host = (parts.hostname or "").lower()
    if not scheme or not host:
        raise MalformedURL(f"missing scheme or host in {raw!r}")
    netloc = host
    if port is not None and port != _DEFAULT_PORTS.get(scheme):
        netloc += f":{port}"
    path = _canonical_pct(parts.path).rstrip("/")
    url = f"{scheme}://{netloc}{path}"
    if parts.query:
        url += "?" + _canonical_pct(parts.query)
    return url


def derive_weblog_id(permalink: str, host_patterns: tuple[str, ...] = ()) -> str:
    """Weblog identity of a normalized permalink.

    Multi-user hosts (matched by a glob over host plus the first two path
    segments, e.g. ``www.livejournal.com/users/*``) keep those two segments;
    everything else collapses to the bare host.
    """
    parts = urlsplit(permalink)
    host = parts.netloc
    segs = [s for s in parts.path.split("/") if s]
    if len(segs) >= 2:
        candidate = f"{host}/{segs[0]}/{segs[1]}"
        for pat in host_patterns:
            if fnmatch.fnmatch(candidate, pat):
                return candidate
    return host


def load_host_patterns(path: str | Path) -> tuple[str, ...]:
    """Read a host-pattern table: one glob per line, # comments allowed."""
    pats = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            pats.append(line)
    return tuple(pats)


@dataclass(frozen=True)
class Post:
    permalink: str
    weblog_id: str
    author: str | None
    published_at: int
    tags: frozenset[str]
    post_links: frozenset[str]
    news_links: frozenset[str]
    content: str | None = None


@dataclass
class IngestReport:
    read: int = 0
    kept: int = 0
    skipped: int = 0
    malformed: int = 0
    duplicates: int = 0


@dataclass
class Corpus:
    posts: list[Post] = field(default_factory=list)
    weblog_index: dict[str, list[Post]] = field(default_factory=dict)
    tag_df: dict[str, int] = field(default_factory=dict)
    permalink_to_weblog: dict[str, str] = field(default_factory=dict)
    host_patterns: tuple[str, ...] = ()

    def add(self, post: Post) -> bool:
        """Insert a post unless its permalink is already present."""
        if post.permalink in self.permalink_to_weblog:
            return False
        self.posts.append(post)
        self.weblog_index.setdefault(post.weblog_id, []).append(post)
        self.permalink_to_weblog[post.permalink] = post.weblog_id
        return True

    def finalize(self) -> None:
        """Recompute tag document frequencies (distinct weblogs per tag)."""
        df: dict[str, int] = {}
        for posts in self.weblog_index.values():
            seen: set[str] = set()
            for p in posts:
                seen.update(p.tags)
            for t in seen:
                df[t] = df.get(t, 0) + 1
        self.tag_df = df


def _parse_ts(value: str) -> int:
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def parse_post(obj: dict, host_patterns: tuple[str, ...] = ()) -> Post:
    """Build a canonical Post from one input record. Raises ValueError."""
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    permalink = normalize_url(obj["permalink"])
    weblog = obj.get("weblog")
    if weblog:
        weblog_id = str(weblog).strip()
    else:
        weblog_id = derive_weblog_id(permalink, host_patterns)
    author = obj.get("author")
    author = str(author).strip() or None if author is not None else None
    ts = _parse_ts(obj["ts"]) if obj.get("ts") else MISSING_TS
    tags = frozenset(
        t.strip().lower() for t in obj.get("tags") or [] if t and t.strip()
    )

    def _links(key: str) -> set[str]:
        out = set()
        for raw in obj.get(key) or []:
            try:
                out.add(normalize_url(raw))
            except MalformedURL:
                continue  # bad outlink drops silently, record survives
        return out

    post_links = _links("post_links")
    news_links = _links("news_links") - post_links
    return Post(
        permalink=permalink,
        weblog_id=weblog_id,
        author=author,
        published_at=ts,
        tags=tags,
        post_links=frozenset(post_links),
        news_links=frozenset(news_links),
        content=obj.get("content"),
    )


def load_corpus(
    path: str | Path,
    host_patterns: tuple[str, ...] = (),
) -> tuple[Corpus, IngestReport]:
    """Load a line-delimited JSON corpus (raw input or saved snapshot).

    Posts are deduplicated by permalink, first occurrence wins. Malformed
    lines are skipped and counted; more than 50% malformed lines is treated
    as corrupt input and raises IngestError.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from None

    report = IngestReport()
    corpus = Corpus(host_patterns=host_patterns)
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        report.read += 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError:
            report.malformed += 1
            continue
        if isinstance(obj, dict) and obj.get("format") == SNAPSHOT_FORMAT:
            # snapshot header; pick up its pattern table unless overridden
            report.read -= 1
            if not corpus.host_patterns:
                corpus.host_patterns = tuple(obj.get("host_patterns") or ())
            continue
        try:
            post = parse_post(obj, corpus.host_patterns)
        except (ValueError, KeyError, TypeError):
            report.malformed += 1
            continue
        if corpus.add(post):
            report.kept += 1
        else:
            report.duplicates += 1
    report.skipped = report.malformed + report.duplicates
    if report.read and report.malformed * 2 > report.read:
        raise IngestError(
            f"{report.malformed}/{report.read} malformed lines in {path}; "
            "input looks corrupt"
        )
    corpus.finalize()
    return corpus, report


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus snapshot (JSONL with a header line)."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "format": SNAPSHOT_FORMAT,
            "host_patterns": list(corpus.host_patterns),
        }
        fh.write(json.dumps(header) + "\n")
        for p in corpus.posts:
            rec = {
                "permalink": p.permalink,
                "weblog": p.weblog_id,
            }
            if p.author:
                rec["author"] = p.author
            if p.published_at != MISSING_TS:
                rec["ts"] = datetime.fromtimestamp(
                    p.published_at, tz=timezone.utc
                ).isoformat()
            if p.tags:
                rec["tags"] = sorted(p.tags)
            if p.post_links:
                rec["post_links"] = sorted(p.post_links)
            if p.news_links:
                rec["news_links"] = sorted(p.news_links)
            if p.content is not None:
                rec["content"] = p.content
            fh.write(json.dumps(rec) + "\n")
