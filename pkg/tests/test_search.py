import itertools

import pytest

from specfib import (
    ScanRequest,
    evaluate_mukai_point,
    rank_one_entries,
    scan_mukai,
    scan_rank_one,
)
from specfib.errors import EmptyRange


OCTIC_BOX = dict(
    H=(1, 0),
    L_ranges=((0, 2), (-1, 1)),
    r_range=(1, 3),
    s_range=(-3, 3),
)


def octic_request(octic_fib, **overrides):
    kwargs = dict(OCTIC_BOX)
    kwargs.update(overrides)
    return ScanRequest(fib=octic_fib, **kwargs)


class TestScanMukai:
    def test_known_hit_present(self, octic_fib):
        result = scan_mukai(octic_request(octic_fib))
        keys = {row.key() for row in result.rows}
        for y in (-1, 0, 1):
            assert (2, (1, y), 1) in keys

    def test_soundness_and_completeness(self, octic_fib):
        req = octic_request(octic_fib)
        result = scan_mukai(req)
        emitted = {row.key() for row in result.rows}
        for r, x, y, s in itertools.product(
            range(1, 4), range(0, 3), range(-1, 2), range(-3, 4)
        ):
            point = evaluate_mukai_point(octic_fib, (1, 0), r, (x, y), s)
            assert ((r, (x, y), s) in emitted) == (point is not None)

    def test_fiber_coefficient_independence(self, octic_fib):
        # The fiber coefficient of L never affects the restriction, so hits
        # come in full y-slices.
        result = scan_mukai(octic_request(octic_fib))
        keys = {row.key() for row in result.rows}
        for r, (x, y), s in keys:
            for y2 in (-1, 0, 1):
                assert (r, (x, y2), s) in keys

    def test_deterministic_and_parallel_identical(self, octic_fib):
        req = octic_request(octic_fib)
        first = scan_mukai(req)
        second = scan_mukai(req)
        parallel = scan_mukai(req, workers=4)
        assert first == second == parallel
        assert first.rows == tuple(sorted(first.rows, key=type(first.rows[0]).key))

    def test_singleton_box(self, octic_fib):
        req = octic_request(
            octic_fib, r_range=(2, 2), L_ranges=((1, 1), (0, 0)), s_range=(1, 1)
        )
        result = scan_mukai(req)
        assert len(result.rows) == 1
        assert result.rows[0].gcd_triple == (8, 0, 3)

    def test_empty_range_rejected(self, octic_fib):
        with pytest.raises(EmptyRange):
            scan_mukai(octic_request(octic_fib, r_range=(3, 1)))

    def test_wrong_coefficient_count(self, octic_fib):
        with pytest.raises(EmptyRange):
            scan_mukai(octic_request(octic_fib, L_ranges=((0, 1),)))

    def test_max_results_truncates(self, octic_fib):
        full = scan_mukai(octic_request(octic_fib))
        capped = scan_mukai(octic_request(octic_fib, max_results=2))
        assert capped.truncated
        assert capped.rows == full.rows[:2]
        assert not full.truncated

    def test_unknown_filter_rejected(self, octic_fib):
        with pytest.raises(EmptyRange):
            octic_request(octic_fib, filters=frozenset({"shiny"}))


class TestRankOneEntries:
    def test_octic_values(self):
        entries = rank_one_entries(3, 2, 0)
        by_kind = {e.kind: e for e in entries}
        dz = by_kind["degree_zero"]
        assert (dz.d, dz.R, dz.ch1_fiber, dz.ch3) == (4, 8, 0, 3)
        tw = by_kind["c1_zero_after_twist"]
        assert (tw.d, tw.ch3) == (7, 9)

    def test_negative_ramification_skipped(self):
        assert rank_one_entries(1, 0, 1) == []

    def test_elliptic_base(self):
        entries = rank_one_entries(2, 3, 1)
        by_kind = {e.kind: e for e in entries}
        assert by_kind["degree_zero"].ch3 == 0
        assert by_kind["c1_zero_after_twist"].ch3 == 4


class TestScanRankOne:
    def test_box_scan(self, octic_fib):
        req = ScanRequest(
            fib=octic_fib,
            H=(1, 0),
            n_range=(1, 3),
            g_range=(0, 4),
            d_range=(0, 20),
        )
        result = scan_rank_one(req)
        keys = [row.key() for row in result.rows]
        assert (3, 2, 4, "degree_zero") in keys
        assert (3, 2, 7, "c1_zero_after_twist") in keys
        assert keys == sorted(keys)

    def test_kind_filter(self, octic_fib):
        req = ScanRequest(
            fib=octic_fib,
            H=(1, 0),
            n_range=(1, 3),
            g_range=(0, 4),
            d_range=(0, 20),
            filters=frozenset({"degree_zero"}),
        )
        result = scan_rank_one(req)
        assert result.rows
        assert all(row.kind == "degree_zero" for row in result.rows)

    def test_d_window(self, octic_fib):
        req = ScanRequest(
            fib=octic_fib, H=(1, 0), n_range=(3, 3), g_range=(2, 2), d_range=(4, 4)
        )
        result = scan_rank_one(req)
        assert [row.kind for row in result.rows] == ["degree_zero"]

    def test_parallel_identical(self, octic_fib):
        req = ScanRequest(
            fib=octic_fib, H=(1, 0), n_range=(1, 5), g_range=(0, 6), d_range=(0, 30)
        )
        assert scan_rank_one(req) == scan_rank_one(req, workers=3)
