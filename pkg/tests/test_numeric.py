"""General solver: convergence, certificates, dual-variable behavior.

The per-sweep log-likelihood record doubles as an empirical check of
the ascent property: each full sweep of exact scalar minimizations of
the dual must not decrease the primal likelihood of the implied point.
"""

import numpy as np
import pytest

from greechie_mle import (
    DualState,
    NonConvergence,
    SolverConfig,
    estimate,
    kkt_residual,
    shapes,
    solve_numeric,
)
from tests.conftest import random_counts


class TestConfig:
    def test_defaults(self):
        cfg = SolverConfig()
        assert cfg.kkt_tolerance == 1e-10
        assert cfg.deterministic_init

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            SolverConfig(kkt_tolerance=0.0)
        with pytest.raises(ValueError):
            SolverConfig(inner_root_tolerance=-1e-9)
        with pytest.raises(ValueError):
            SolverConfig(max_sweeps=0)
        with pytest.raises(ValueError):
            SolverConfig(deterministic_init=False)


class TestSolveNumeric:
    def test_requires_positive_counts(self):
        d = shapes.tennis()
        freq = {x: 1 for x in d.outcomes}
        freq["e"] = 0
        with pytest.raises(ValueError, match="positive"):
            solve_numeric(d, freq)

    def test_single_edge_matches_empirical(self):
        d = shapes.tennis()
        freq = {"a": 10, "c": 30, "e": 40, "b": 20, "d": 40}
        r = solve_numeric(d, freq)
        assert r.method == "numeric"
        assert abs(r.p["e"] - 2 / 7) < 1e-9
        assert abs(r.p["a"] - 5 / 28) < 1e-9
        assert r.residual < 1e-10

    def test_agrees_with_closed_forms(self, rng):
        for name, d in shapes.closed_form_shapes().items():
            for _ in range(3):
                freq = random_counts(d, rng)
                exact = estimate(d, freq, method="closed")
                numeric = solve_numeric(d, freq)
                worst = max(abs(float(exact.p[x]) - numeric.p[x]) for x in d.outcomes)
                assert worst < 1e-8, name

    def test_four_cycle_symmetric_optimum(self):
        d = shapes.four_cycle()
        r = solve_numeric(d, {x: 1 for x in d.outcomes})
        for x in d.outcomes:
            target = 0.25 if x.startswith("k") else 0.5
            assert abs(r.p[x] - target) < 1e-9, x

    def test_negative_multiplier_reached(self):
        # Heavy interior counts on the teeth starve the spine: its
        # multiplier must go negative for the shared outcomes to keep
        # n(x)/p(x) consistent across operations.
        d = shapes.comb()
        freq = {x: (1 if x.startswith("t") else 100) for x in d.outcomes}
        r = solve_numeric(d, freq)
        multipliers = r.diagnostics["multipliers"]
        assert multipliers[0] < 0.0
        assert r.residual < 1e-10

    def test_sweep_dual_never_increases(self, rng):
        # Each scalar solve minimizes the dual objective in one
        # coordinate, so the recorded dual values must come down sweep
        # over sweep.  The primal surrogate in sweep_loglik carries no
        # such guarantee: before the iterate is feasible it regularly
        # overshoots the optimum and falls back.
        for d in shapes.all_shapes().values():
            freq = random_counts(d, rng, low=1, high=200)
            r = solve_numeric(d, freq)
            dual = r.diagnostics["sweep_dual"]
            scale = max(1.0, abs(dual[-1]))
            for earlier, later in zip(dual, dual[1:]):
                assert later <= earlier + 1e-12 * scale

    def test_sweep_records_cover_every_sweep(self):
        d = shapes.comb()
        freq = {x: (1 if x.startswith("t") else 100) for x in d.outcomes}
        r = solve_numeric(d, freq)
        track = r.diagnostics["sweep_loglik"]
        assert len(track) == r.diagnostics["sweeps"]
        assert len(r.diagnostics["sweep_dual"]) == len(track)
        assert track[-1] == pytest.approx(r.log_lik, abs=1e-9)

    def test_deterministic(self):
        d = shapes.four_cycle()
        freq = {x: 3 + i for i, x in enumerate(d.outcomes)}
        a = solve_numeric(d, freq)
        b = solve_numeric(d, freq)
        assert a.p == b.p
        assert a.diagnostics["sweeps"] == b.diagnostics["sweeps"]

    def test_sweep_budget_exhaustion(self):
        d = shapes.four_cycle()
        freq = {x: 3 + i for i, x in enumerate(d.outcomes)}
        with pytest.raises(NonConvergence) as info:
            solve_numeric(d, freq, SolverConfig(max_sweeps=1))
        assert info.value.iterations == 1

    def test_dual_state_recorded(self):
        d = shapes.tennis()
        freq = {x: 2 for x in d.outcomes}
        r = solve_numeric(d, freq)
        dual = r.diagnostics["dual_state"]
        assert isinstance(dual, DualState)
        dual.validate(d, freq)


class TestKktResidual:
    def test_zero_at_exact_optimum(self):
        d = shapes.tennis()
        freq = {"a": 10, "c": 30, "e": 40, "b": 20, "d": 40}
        p = {x: float(v) for x, v in estimate(d, freq).p.items()}
        assert kkt_residual(d, freq, p) < 1e-12

    def test_grows_away_from_optimum(self):
        d = shapes.tennis()
        freq = {"a": 10, "c": 30, "e": 40, "b": 20, "d": 40}
        p = {x: float(v) for x, v in estimate(d, freq).p.items()}
        base = kkt_residual(d, freq, p)
        worse = dict(p)
        worse["a"] += 0.05
        worse["c"] -= 0.05
        assert kkt_residual(d, freq, worse) > max(base, 1e-3)

    def test_rejects_zero_probability_on_observed(self):
        d = shapes.tennis()
        freq = {x: 1 for x in d.outcomes}
        p = {x: 0.2 for x in d.outcomes}
        p["a"] = 0.0
        with pytest.raises(ValueError):
            kkt_residual(d, freq, p)

    def test_validate_rejects_nonpositive_sum(self):
        d = shapes.tennis()
        freq = {x: 1 for x in d.outcomes}
        lam = {op: -1.0 for op in d.operations}
        with pytest.raises(ValueError):
            DualState(lam=lam).validate(d, freq)


def test_numeric_handles_reduced_thin_shapes():
    # Shapes that violate the separation rule still have a unique MLE;
    # the solver must not depend on validity.
    d = shapes.thin_path3()
    freq = {"a": 5, "y1": 1, "b": 4, "y2": 2, "c": 3}
    r = solve_numeric(d, freq)
    for op in d.operations:
        assert abs(sum(r.p[x] for x in op) - 1.0) < 1e-9

    g = shapes.g1_violation()
    freq2 = {"a": 2, "b": 3, "c": 5}
    r2 = solve_numeric(g, freq2)
    assert abs(r2.p["a"] - 0.2) < 1e-9
    assert abs(r2.p["b"] - 0.8) < 1e-9
    assert abs(r2.p["c"] - 0.8) < 1e-9
