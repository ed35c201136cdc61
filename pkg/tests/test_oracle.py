"""Feasible-region sampling and the brute-force reference optimizer."""

import numpy as np
import pytest

from greechie_mle import (
    DegeneratePolytope,
    OracleBudget,
    brute_force_mle,
    build_diagram,
    check_probability,
    estimate,
    incidence_matrix,
    interior_point,
    log_likelihood,
    nullspace_basis,
    sample_feasible,
    shapes,
)

SMALL = OracleBudget(sample_count=3000, refine_steps=400, rng_seed=5)


class TestBudget:
    def test_defaults(self):
        budget = OracleBudget()
        assert budget.sample_count == 100_000
        assert budget.rng_seed == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            OracleBudget(sample_count=0)
        with pytest.raises(ValueError):
            OracleBudget(refine_steps=0)


class TestNullspace:
    def test_incidence_shape(self):
        d = shapes.path3()
        inc = incidence_matrix(d)
        assert inc.shape == (3, 7)
        assert inc.sum() == sum(len(op) for op in d.operations)

    def test_basis_annihilated_exactly(self):
        for name, d in shapes.all_shapes().items():
            inc = incidence_matrix(d)
            basis = nullspace_basis(d)
            if basis.size:
                assert np.max(np.abs(inc @ basis.T)) == 0.0, name

    def test_dimension_matches_rank(self):
        for d in shapes.all_shapes().values():
            inc = incidence_matrix(d)
            expected = len(d.outcomes) - np.linalg.matrix_rank(inc)
            assert len(nullspace_basis(d)) == expected


class TestInteriorPoint:
    def test_strictly_positive_and_feasible(self):
        for name, d in shapes.all_shapes().items():
            point = interior_point(d)
            assert point is not None, name
            assert min(point.values()) > 0.0, name
            assert check_probability(d, point, tol=1e-9), name

    def test_uniform_on_symmetric_edge(self):
        d = build_diagram(["a", "b", "c"], [["a", "b", "c"]])
        point = interior_point(d)
        for v in point.values():
            assert abs(v - 1 / 3) < 1e-9


class TestSampleFeasible:
    def test_stream_length_and_feasibility(self):
        d = shapes.path3()
        start = interior_point(d)
        samples = list(sample_feasible(d, start, SMALL))
        assert len(samples) == SMALL.sample_count
        for s in samples[:: len(samples) // 50]:
            assert check_probability(d, s, tol=1e-9)

    def test_deterministic_per_seed(self):
        d = shapes.four_cycle()
        start = interior_point(d)
        a = list(sample_feasible(d, start, SMALL))
        b = list(sample_feasible(d, start, SMALL))
        assert a == b
        other = OracleBudget(sample_count=SMALL.sample_count, rng_seed=6)
        c = list(sample_feasible(d, start, other))
        assert c != a

    def test_moves_through_the_region(self):
        d = shapes.tennis()
        start = interior_point(d)
        samples = list(sample_feasible(d, start, SMALL))
        spread = max(s["e"] for s in samples) - min(s["e"] for s in samples)
        assert spread > 0.5

    def test_degenerate_polytope(self):
        d = build_diagram(["a"], [["a"]])
        with pytest.raises(DegeneratePolytope) as info:
            list(sample_feasible(d, interior_point(d), SMALL))
        assert abs(info.value.point["a"] - 1.0) < 1e-9


class TestBruteForce:
    def test_dominated_by_solver(self, rng):
        for d in (shapes.tennis(), shapes.path3(), shapes.four_cycle()):
            freq = {x: int(v) for x, v in zip(d.outcomes, rng.integers(1, 30, len(d.outcomes)))}
            best = brute_force_mle(d, freq, SMALL)
            solver_ll = estimate(d, freq).log_lik
            oracle_ll = log_likelihood(freq, best)
            assert solver_ll >= oracle_ll - 1e-9

    def test_refinement_approaches_optimum(self):
        d = shapes.tennis()
        freq = {"a": 10, "c": 30, "e": 40, "b": 20, "d": 40}
        budget = OracleBudget(sample_count=20_000, refine_steps=1000, rng_seed=3)
        best = brute_force_mle(d, freq, budget)
        target = estimate(d, freq)
        assert log_likelihood(freq, best) == pytest.approx(target.log_lik, abs=1e-6)

    def test_degenerate_short_circuit(self):
        d = build_diagram(["a"], [["a"]])
        best = brute_force_mle(d, {"a": 7}, SMALL)
        assert abs(best["a"] - 1.0) < 1e-9
