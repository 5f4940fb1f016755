import itertools
import json
import math

import pytest
from hypothesis import given, strategies as st
from scipy import stats as scipy_stats

from blogrank.evaluation import (
    ClickRecord,
    QuerySession,
    aggregate_si,
    load_click_log,
    success_index,
    t_test,
)


def si_reference(positions):
    """Direct transcription of the click-score sum, kept separate from the
    implementation under test."""
    n = len(positions)
    return sum((n - t + 1) / (d * n) for t, d in enumerate(positions, 1)) / n


class TestSuccessIndex:
    def test_two_clicks_best_first(self):
        assert success_index([2, 10]) == pytest.approx(0.275, abs=1e-12)

    def test_two_clicks_best_second(self):
        assert success_index([10, 2]) == pytest.approx(0.175, abs=1e-12)

    def test_single_top_click_is_one(self):
        assert success_index([1]) == 1.0

    def test_fewer_clicks_can_beat_more(self):
        a = success_index([2, 1, 3])
        b = success_index([1, 2, 3, 4])
        assert a == pytest.approx(0.42593, abs=1e-4)
        assert b == pytest.approx(0.40104, abs=1e-4)
        assert a > b

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            success_index([])

    def test_zero_position_rejected(self):
        with pytest.raises(ValueError):
            success_index([0, 1])

    @given(st.lists(st.integers(min_value=1, max_value=1000), min_size=1, max_size=30))
    def test_bounds(self, positions):
        si = success_index(positions)
        assert 0 < si <= 1

    @given(
        st.lists(st.integers(min_value=1, max_value=50), min_size=1, max_size=10),
        st.integers(min_value=0, max_value=9),
    )
    def test_decreasing_any_position_increases_si(self, positions, which):
        which %= len(positions)
        if positions[which] == 1:
            positions[which] = 2
        improved = list(positions)
        improved[which] -= 1
        assert success_index(improved) > success_index(positions)

    def test_ascending_click_order_maximizes(self):
        # exhaustive over all orderings of position multisets, n <= 5
        for positions in ([1, 2], [3, 1, 7], [2, 2, 5, 9], [1, 3, 4, 8, 20]):
            best = success_index(sorted(positions))
            for perm in itertools.permutations(positions):
                assert success_index(list(perm)) <= best + 1e-15

    @given(st.lists(st.integers(min_value=1, max_value=100), min_size=1, max_size=20))
    def test_matches_reference(self, positions):
        assert success_index(positions) == pytest.approx(
            si_reference(positions), abs=1e-15
        )


def session(method, positions, query_id=None):
    return QuerySession(
        query_id=query_id or f"q{id(positions)}",
        user="u",
        method=method,
        clicks=[ClickRecord(i + 1, d) for i, d in enumerate(positions)],
    )


class TestAggregateSi:
    def test_one_session_per_method(self):
        sessions = [
            session("pagerank", [2], "q1"),
            session("xrank", [2], "q2"),
            session("blogrank", [2], "q3"),
        ]
        report = aggregate_si(sessions)
        assert set(report.methods) == {"pagerank", "xrank", "blogrank"}
        for stats in report.methods.values():
            assert stats.count == 1
            assert stats.mean_si == pytest.approx(0.5)

    def test_clickless_sessions_excluded(self):
        report = aggregate_si([session("pagerank", [], "q1")])
        assert report.methods == {}
        assert report.excluded == 1

    def test_duplicate_positions_dropped_first_wins(self):
        qs = session("xrank", [3, 3, 1], "q1")
        report = aggregate_si([qs])
        assert report.methods["xrank"].mean_si == pytest.approx(
            success_index([3, 1])
        )

    def test_means_match_independent_recomputation(self):
        import random

        rng = random.Random(23)
        sessions = []
        expected = {}
        for i in range(30):
            method = ("pagerank", "xrank", "blogrank")[i % 3]
            positions = [rng.randrange(1, 20) for _ in range(rng.randrange(1, 5))]
            # dedup like the session does, first occurrence wins
            seen, deduped = set(), []
            for d in positions:
                if d not in seen:
                    seen.add(d)
                    deduped.append(d)
            expected.setdefault(method, []).append(si_reference(deduped))
            sessions.append(session(method, positions, f"q{i}"))
        report = aggregate_si(sessions)
        for method, values in expected.items():
            stats = report.methods[method]
            assert stats.count == len(values)
            assert stats.mean_si == pytest.approx(sum(values) / len(values))
            mean = sum(values) / len(values)
            var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
            assert stats.std_si == pytest.approx(math.sqrt(var))


class TestTTest:
    def test_identical_groups(self):
        res = t_test([1, 2, 3], [1, 2, 3])
        assert res.t == 0.0
        assert res.p == pytest.approx(1.0)

    def test_extreme_separation(self):
        # 5-point groups shifted by +10: t = -10, df = 8, p ~ 8.5e-6
        a = [1.0, 2.0, 3.0, 4.0, 5.0]
        b = [x + 10 for x in a]
        assert t_test(a, b).p < 1e-5
        # with 10-point groups the same shift drops below 1e-6
        a10 = [float(i) for i in range(1, 11)]
        b10 = [x + 10 for x in a10]
        assert t_test(a10, b10).p < 1e-6

    def test_matches_scipy_oracle(self):
        a = [0.31, 0.42, 0.18, 0.55, 0.47, 0.29, 0.61, 0.38, 0.44, 0.52]
        b = [0.12, 0.25, 0.31, 0.09, 0.22, 0.18, 0.27, 0.15, 0.21, 0.3]
        res = t_test(a, b)
        ref = scipy_stats.ttest_ind(a, b, equal_var=False)
        assert res.t == pytest.approx(ref.statistic, abs=1e-6)
        assert res.p == pytest.approx(ref.pvalue, abs=1e-4)

    def test_symmetry(self):
        a = [0.2, 0.5, 0.7, 0.3]
        b = [0.4, 0.6, 0.9]
        ab = t_test(a, b)
        ba = t_test(b, a)
        assert ab.t == pytest.approx(-ba.t)
        assert ab.p == pytest.approx(ba.p)

    def test_degenerate_equal_constant_groups(self):
        res = t_test([0.5, 0.5], [0.5, 0.5])
        assert (res.t, res.p) == (0.0, 1.0)

    def test_degenerate_distinct_constant_groups(self):
        res = t_test([0.5, 0.5], [0.7, 0.7])
        assert res.p == 0.0

    def test_insufficient_data(self):
        with pytest.raises(ValueError):
            t_test([0.5], [0.2, 0.3])


class TestClickLogLoading:
    def test_session_per_line_format(self, tmp_path):
        path = tmp_path / "clicks.jsonl"
        path.write_text(
            json.dumps(
                {
                    "query_id": "q1",
                    "user": "u1",
                    "method": "Rank3",
                    "ts": "2006-03-01T00:00:00Z",
                    "clicks": [
                        {"order": 1, "position": 2, "permalink": "http://a/p"},
                        {"order": 2, "position": 10},
                    ],
                }
            )
            + "\n"
        )
        sessions = load_click_log(path)
        assert len(sessions) == 1
        assert sessions[0].method == "blogrank"  # Rank3 alias
        assert sessions[0].click_positions() == [2, 10]

    def test_event_stream_format(self, tmp_path):
        path = tmp_path / "events.jsonl"
        lines = [
            {"type": "session", "query_id": "q1", "user": "u", "method": "xrank"},
            {"type": "click", "query_id": "q1", "order": 1, "position": 3},
            {"type": "click", "query_id": "q1", "order": 2, "position": 3},
            {"type": "click", "query_id": "q1", "order": 3, "position": 1},
        ]
        path.write_text("".join(json.dumps(l) + "\n" for l in lines))
        sessions = load_click_log(path)
        assert sessions[0].click_positions() == [3, 1]
