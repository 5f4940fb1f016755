"""Click-log evaluation: Success Index, per-method aggregation, Welch t-test."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from scipy.stats import t as t_dist

from .ranker import METHOD_ALIASES


def success_index(positions: Sequence[int]) -> float:
    """Click-order score in (0, 1]: rewards clicking high list positions
    early. positions[t-1] is the list position of the t-th click.
    """
    n = len(positions)
    if n == 0:
        raise ValueError("success_index is undefined for an empty click list")
    if any(d < 1 for d in positions):
        raise ValueError("list positions are 1-based")
    return sum((n - t + 1) / (d * n) for t, d in enumerate(positions, 1)) / n


@dataclass(frozen=True)
class ClickRecord:
    order: int
    position: int
    permalink: str = ""


@dataclass
class QuerySession:
    query_id: str
    user: str
    method: str
    ts: str = ""
    query: str = ""
    clicks: list[ClickRecord] = field(default_factory=list)

    def click_positions(self) -> list[int]:
        """Positions in click order, duplicate positions dropped (first wins)."""
        seen: set[int] = set()
        out = []
        for c in sorted(self.clicks, key=lambda c: c.order):
            if c.position not in seen:
                seen.add(c.position)
                out.append(c.position)
        return out


def canonical_method(name: str) -> str:
    method = METHOD_ALIASES.get(name.strip().lower())
    if method is None:
        raise ValueError(f"unknown ranking method {name!r}")
    return method


def load_click_log(path: str | Path) -> list[QuerySession]:
    """Read a click log in either session-per-line form (objects with a
    `clicks` array) or event-stream form (`type: session` / `type: click`
    lines, as the live service appends them).
    """
    sessions: dict[str, QuerySession] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        kind = obj.get("type")
        if kind == "session" or "clicks" in obj:
            qs = QuerySession(
                query_id=obj["query_id"],
                user=obj.get("user", ""),
                method=canonical_method(obj["method"]),
                ts=obj.get("ts", ""),
                query=obj.get("query", ""),
            )
            for c in obj.get("clicks") or []:
                qs.clicks.append(
                    ClickRecord(c["order"], c["position"], c.get("permalink", ""))
                )
            sessions[qs.query_id] = qs
        elif kind == "click":
            qs = sessions.get(obj["query_id"])
            if qs is None:
                continue  # click for an unknown session; tolerate
            qs.clicks.append(
                ClickRecord(
                    obj.get("order", len(qs.clicks) + 1),
                    obj["position"],
                    obj.get("permalink", ""),
                )
            )
        else:
            raise ValueError(f"unrecognized click-log line: {line[:80]!r}")
    return list(sessions.values())


@dataclass
class MethodStats:
    count: int
    mean_si: float
    std_si: float
    values: list[float] = field(default_factory=list)


@dataclass
class SiReport:
    methods: dict[str, MethodStats]
    excluded: int  # sessions without any click


def aggregate_si(sessions: Sequence[QuerySession]) -> SiReport:
    """Per-method count, mean and sample standard deviation of per-query SI.
    Sessions without clicks are excluded and counted separately.
    """
    groups: dict[str, list[float]] = {}
    excluded = 0
    for qs in sessions:
        positions = qs.click_positions()
        if not positions:
            excluded += 1
            continue
        groups.setdefault(qs.method, []).append(success_index(positions))
    methods = {}
    for method, values in sorted(groups.items()):
        n = len(values)
        mean = sum(values) / n
        std = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1)) if n > 1 else 0.0
        methods[method] = MethodStats(n, mean, std, values)
    return SiReport(methods, excluded)


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p: float  # two-tailed; halve for one-tailed


def t_test(group_a: Sequence[float], group_b: Sequence[float]) -> TTestResult:
    """Welch's unequal-variance two-sample t-test, two-tailed p-value."""
    na, nb = len(group_a), len(group_b)
    if na < 2 or nb < 2:
        raise ValueError("each group needs at least 2 values")
    ma = sum(group_a) / na
    mb = sum(group_b) / nb
    va = sum((x - ma) ** 2 for x in group_a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in group_b) / (nb - 1)
    sea, seb = va / na, vb / nb
    se = sea + seb
    if se == 0.0:
        if ma == mb:
            return TTestResult(0.0, float(na + nb - 2), 1.0)
        return TTestResult(math.copysign(math.inf, ma - mb), float(na + nb - 2), 0.0)
    t_stat = (ma - mb) / math.sqrt(se)
    df = se**2 / (sea**2 / (na - 1) + seb**2 / (nb - 1))
    p = 2.0 * float(t_dist.sf(abs(t_stat), df))
    return TTestResult(t_stat, df, p)
