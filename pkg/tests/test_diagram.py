"""Structure validation, cycle detection, and zero-count reduction."""

import math

import pytest

from greechie_mle import (
    DuplicateEdge,
    DuplicateOutcome,
    EmptyAfterReduction,
    EmptyEdge,
    IntersectionTooLarge,
    UncoveredOutcome,
    UnknownMember,
    build_diagram,
    check_frequencies,
    check_g1,
    check_g2,
    check_probability,
    log_likelihood,
    minimum_cycle_length,
    reduce_zero_counts,
    shapes,
    validate_diagram,
)


class TestBuildDiagram:
    def test_accepts_and_freezes(self):
        d = build_diagram(["a", "b", "c"], [["a", "b"], ["b", "c"]])
        assert d.outcomes == ("a", "b", "c")
        assert d.operations == (("a", "b"), ("b", "c"))
        assert d.edges_of["b"] == (0, 1)

    def test_duplicate_outcome(self):
        with pytest.raises(DuplicateOutcome):
            build_diagram(["a", "a"], [["a"]])

    def test_duplicate_member_inside_operation(self):
        with pytest.raises(DuplicateOutcome):
            build_diagram(["a", "b"], [["a", "b", "a"]])

    def test_duplicate_edge_regardless_of_order(self):
        with pytest.raises(DuplicateEdge):
            build_diagram(["a", "b"], [["a", "b"], ["b", "a"]])

    def test_empty_edge(self):
        with pytest.raises(EmptyEdge):
            build_diagram(["a"], [["a"], []])

    def test_unknown_member(self):
        with pytest.raises(UnknownMember):
            build_diagram(["a", "b"], [["a", "b"], ["a", "z"]])

    def test_uncovered_outcome(self):
        with pytest.raises(UncoveredOutcome):
            build_diagram(["a", "b", "c"], [["a", "b"]])

    def test_nonstring_outcome(self):
        with pytest.raises(Exception):
            build_diagram([1, 2], [[1, 2]])


class TestSeparationRule:
    def test_reference_shapes_pass(self):
        for name, d in shapes.all_shapes().items():
            assert check_g1(d).passed, name

    def test_single_new_outcome_fails(self):
        report = check_g1(shapes.g1_violation())
        assert not report.passed
        # Both ordered directions violate.
        assert len(report.violations) == 2
        assert all(v.rule == "G1" for v in report.violations)

    def test_thin_path_fails(self):
        assert not check_g1(shapes.thin_path3()).passed


class TestCycles:
    def test_acyclic_shapes(self):
        for make in (shapes.path3, shapes.path5, shapes.comb, shapes.disjoint_pairs):
            assert minimum_cycle_length(make()) == (None, None)

    def test_triangle_length_three(self):
        length, witness = minimum_cycle_length(shapes.triangle())
        assert length == 3
        assert witness is not None

    def test_four_cycle_length_four(self):
        length, _ = minimum_cycle_length(shapes.four_cycle())
        assert length == 4

    def test_witness_is_a_real_cycle(self):
        d = shapes.triangle()
        length, witness = minimum_cycle_length(d)
        assert len(witness) == 2 * length
        vertices = witness[0::2]
        edges = witness[1::2]
        assert len(set(vertices)) == length
        assert len(set(edges)) == length
        for k in range(length):
            members = set(d.operations[edges[k]])
            assert vertices[k] in members
            assert vertices[(k + 1) % length] in members

    def test_intersection_precondition(self):
        d = build_diagram(["a", "b", "c", "x"], [["a", "b", "x"], ["a", "b", "c"]])
        with pytest.raises(IntersectionTooLarge):
            minimum_cycle_length(d)

    def test_cycle_bounds(self):
        assert not check_g2(shapes.triangle(), "omp").passed
        assert not check_g2(shapes.triangle(), "oml").passed
        assert check_g2(shapes.four_cycle(), "omp").passed
        assert not check_g2(shapes.four_cycle(), "oml").passed
        assert check_g2(shapes.path3(), "oml").passed

    def test_bad_target(self):
        with pytest.raises(ValueError):
            check_g2(shapes.path3(), "omw")


class TestValidateDiagram:
    def test_valid_shape(self):
        assert validate_diagram(shapes.path3()).passed

    def test_collects_all_rules(self):
        report = validate_diagram(shapes.triangle())
        rules = {v.rule for v in report.violations}
        assert rules == {"G2-OMP", "G2-OML"}

    def test_intersection_reported_not_raised(self):
        d = build_diagram(["a", "b", "c", "x"], [["a", "b", "x"], ["a", "b", "c"]])
        report = validate_diagram(d)
        assert "INTERSECTION" in {v.rule for v in report.violations}


class TestFrequencies:
    def test_domain_mismatch(self):
        d = shapes.disjoint_pairs()
        with pytest.raises(ValueError, match="missing"):
            check_frequencies(d, {"a": 1, "b": 1, "c": 1})
        with pytest.raises(ValueError, match="unknown"):
            check_frequencies(d, {"a": 1, "b": 1, "c": 1, "d": 1, "z": 1})

    def test_value_validation(self):
        d = shapes.disjoint_pairs()
        base = {"a": 1, "b": 1, "c": 1, "d": 1}
        for bad in (-1, 1.5, True):
            freq = dict(base, a=bad)
            with pytest.raises(ValueError):
                check_frequencies(d, freq)


class TestReduction:
    def test_no_zeros_is_identity(self):
        d = shapes.tennis()
        freq = {x: 2 for x in d.outcomes}
        red = reduce_zero_counts(d, freq)
        assert red.diagram is d
        assert red.zeroed == frozenset()

    def test_removes_outcome_everywhere(self):
        d = shapes.tennis()
        freq = {"a": 1, "c": 3, "e": 0, "b": 1, "d": 2}
        red = reduce_zero_counts(d, freq)
        assert red.zeroed == {"e"}
        assert red.diagram.operations == (("a", "c"), ("b", "d"))
        assert red.dropped_operations == ()

    def test_emptied_operation_is_reported(self):
        d = shapes.disjoint_pairs()
        red = reduce_zero_counts(d, {"a": 1, "b": 1, "c": 0, "d": 0})
        assert red.dropped_operations == (("c", "d"),)

    def test_collapsed_duplicates_keep_one_copy(self):
        d = build_diagram(["a", "b", "c"], [["a", "b"], ["a", "c"]])
        red = reduce_zero_counts(d, {"a": 5, "b": 0, "c": 0})
        assert red.diagram.operations == (("a",),)
        assert red.collapsed_operations == (("a", "c"),)

    def test_all_zero_rejected(self):
        d = shapes.disjoint_pairs()
        with pytest.raises(EmptyAfterReduction):
            reduce_zero_counts(d, {x: 0 for x in d.outcomes})

    def test_idempotent(self):
        d = shapes.path3()
        freq = {x: (0 if x == "b" else 4) for x in d.outcomes}
        once = reduce_zero_counts(d, freq)
        twice = reduce_zero_counts(once.diagram, once.freq)
        assert twice.diagram == once.diagram
        assert twice.zeroed == frozenset()


class TestLikelihoodHelpers:
    def test_log_likelihood_value(self):
        freq = {"a": 2, "b": 1}
        p = {"a": 0.5, "b": 0.25}
        expected = 2 * math.log(0.5) + math.log(0.25)
        assert log_likelihood(freq, p) == pytest.approx(expected, rel=1e-15)

    def test_zero_count_contributes_nothing(self):
        assert log_likelihood({"a": 0, "b": 1}, {"a": 0.0, "b": 1.0}) == 0.0

    def test_observed_zero_probability_is_minus_inf(self):
        assert log_likelihood({"a": 1}, {"a": 0.0}) == -math.inf

    def test_check_probability(self):
        d = shapes.disjoint_pairs()
        good = {"a": 0.25, "b": 0.75, "c": 0.5, "d": 0.5}
        assert check_probability(d, good)
        assert not check_probability(d, dict(good, a=0.30))
        assert not check_probability(d, dict(good, a=-0.25, b=1.25))

    def test_check_probability_tolerance_slack(self):
        d = build_diagram(["a"], [["a"]])
        # Numeric routes may overshoot the box by rounding; the sum
        # tolerance applies to the range too.
        assert check_probability(d, {"a": 1.0 + 1e-12}, tol=1e-9)
        assert not check_probability(d, {"a": 1.0 + 1e-6}, tol=1e-9)
