import itertools

import pytest

from parkline.enumeration import (
    CapExceededError,
    StrictTableError,
    check_universal,
    count_parking,
    count_words_to_set,
    orbit_audit,
)
from parkline.procedures import builtin, is_parking, table_procedure

LOCAL = ["right", "left", "closest", "prime", "lbs"]


class TestCountParking:
    @pytest.mark.parametrize("r,expected", [(1, 1), (2, 3), (3, 16), (4, 125)])
    def test_right_small_values(self, r, expected):
        assert count_parking(builtin("right"), r) == expected

    def test_evenodd_r2(self):
        assert count_parking(builtin("evenodd"), 2) == 2

    def test_naples_r2(self):
        assert count_parking(builtin("naples", k=1), 2) == 4

    def test_far_r3(self):
        assert count_parking(builtin("far"), 3) == 14

    def test_far_some_convention_gives_14(self):
        counts = {
            conv: count_parking(builtin("far", convention=conv), 3)
            for conv in ("prose", "notation")
        }
        assert counts["prose"] == 14  # the reading that matches the known count
        assert 14 in counts.values()

    def test_brute_force_definition(self):
        # independent oracle: count by filtering is_parking over the space
        p = builtin("closest")
        for r in (1, 2, 3):
            direct = sum(
                is_parking(p, w)
                for w in itertools.product(range(1, r + 2), repeat=r)
            )
            assert count_parking(p, r) == direct

    def test_cap(self):
        with pytest.raises(CapExceededError):
            count_parking(builtin("right"), 9)
        with pytest.raises(ValueError):
            count_parking(builtin("right"), 0)

    def test_strict_table_refuses_beyond_rows(self):
        from parkline.procedures import DirTable, Direction

        table = DirTable(
            ((Direction.RIGHT,), (Direction.RIGHT, Direction.LEFT),
             (Direction.LEFT, Direction.RIGHT, Direction.LEFT)),
        )
        strict = table_procedure(table, strict=True)
        assert count_parking(strict, 3) == 16
        with pytest.raises(StrictTableError):
            count_parking(strict, 4)
        loose = table_procedure(table)
        assert count_parking(loose, 4) == 125


class TestOrbitAudit:
    def test_right_r3(self):
        rep = orbit_audit(builtin("right"), 3)
        assert rep.orbit_count == 16
        assert rep.histogram == {1: 16}
        assert rep.all_one
        assert rep.parking_total == 16

    def test_far_r3_footnote(self):
        rep = orbit_audit(builtin("far"), 3)
        assert rep.histogram == {0: 2, 1: 14}
        empties = {v.representative for v in rep.violations}
        assert empties == {(1, 3, 1), (1, 3, 3)}
        members = {frozenset(v.members) for v in rep.violations}
        assert frozenset({(1, 3, 1), (2, 4, 2), (3, 1, 3), (4, 2, 4)}) in members
        assert frozenset({(1, 3, 3), (2, 4, 4), (3, 1, 1), (4, 2, 2)}) in members
        assert all(v.parking_count == 0 for v in rep.violations)

    def test_single_car(self):
        rep = orbit_audit(builtin("right"), 1)
        assert rep.orbit_count == 1
        assert rep.histogram == {1: 1}

    @pytest.mark.parametrize("name", LOCAL)
    def test_local_catalog_all_one(self, name):
        for r in range(1, 5):
            assert orbit_audit(builtin(name), r).all_one

    def test_naples_violations_recorded(self):
        rep = orbit_audit(builtin("naples", k=1), 2)
        assert not rep.all_one
        assert rep.parking_total == 4
        assert sum(k * v for k, v in rep.histogram.items()) == 4


class TestUniversality:
    @pytest.mark.parametrize("name", ["closest", "prime"])
    def test_local_passes(self, name):
        report = check_universal(builtin(name), 5)
        assert report.passed
        assert [e.expected for e in report.entries] == [1, 3, 16, 125, 1296]

    def test_naples_fails_at_2(self):
        report = check_universal(builtin("naples", k=1), 2)
        assert not report.passed
        failure = report.first_failure
        assert failure.r == 2 and failure.count == 4 and failure.expected == 3

    def test_index_rules_extended_hypothesis(self):
        # rules deciding by car index keep one parking word per orbit
        from parkline.procedures import LEFT, RIGHT, index_rule_procedure

        for dirs in itertools.product((LEFT, RIGHT), repeat=4):
            p = index_rule_procedure(dirs)
            assert p.extended_cyclic
            assert orbit_audit(p, 4).all_one


class TestCountWordsToSet:
    def test_singleton(self):
        assert count_words_to_set(builtin("right"), {1}) == 1

    def test_interval(self):
        assert count_words_to_set(builtin("right"), {1, 2}) == 3

    def test_two_blocks(self):
        assert count_words_to_set(builtin("right"), {1, 3}) == 2

    def test_empty(self):
        assert count_words_to_set(builtin("right"), set()) == 1

    @pytest.mark.parametrize("name", ["right", "prime", "closest"])
    def test_formula_equals_brute(self, name):
        p = builtin(name)
        for S in ({2, 3, 5}, {-1, 0, 2, 4}, {1, 2, 3, 4}, {0, 2, 4}):
            assert count_words_to_set(p, S, "formula") == count_words_to_set(p, S, "brute")

    @pytest.mark.parametrize("name", ["right", "lbs", "naples:k=2", "far"])
    def test_pad_invariance(self, name):
        # letters outside S never produce S, so widening the alphabet is moot
        from parkline.procedures import parse_proc_spec

        p = parse_proc_spec(name)
        for S in ({1, 2}, {1, 3}, {2, 3, 5}):
            base = count_words_to_set(p, S, "brute", pad=0)
            assert count_words_to_set(p, S, "brute", pad=2) == base

    def test_formula_requires_local(self):
        with pytest.raises(ValueError):
            count_words_to_set(builtin("naples", k=1), {1, 2}, "formula")
        with pytest.raises(ValueError):
            count_words_to_set(builtin("right"), {1, 2}, "nonsense")

    @pytest.mark.parametrize("name", ["closest", "lbs"])
    def test_window_sum_property(self, name):
        # grouping the whole word space by final set partitions it, and
        # each group whose set stays inside the window matches the brute count
        from collections import Counter

        from parkline.procedures import run

        p = builtin(name)
        r, window = 3, range(1, 5)
        reached = Counter()
        for w in itertools.product(window, repeat=r):
            reached[run(p, w).spots] += 1
        assert sum(reached.values()) == len(window) ** r
        for S, direct in reached.items():
            if S <= set(window):
                assert count_words_to_set(p, S, "brute") == direct
