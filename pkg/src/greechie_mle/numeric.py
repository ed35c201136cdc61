"""General concave MLE solver: dual coordinate ascent.

Maximizes sum_x n(x) ln p(x) over per-operation normalization and
nonnegativity, for any valid diagram.  Stationarity of the Lagrangian
gives p(x) = n(x) / sum_{B containing x} lambda_B, so the dual variables
are one multiplier per operation.  Sweeping the operations and solving
each multiplier's scalar equation exactly is a cyclic minimization of
the (convex, smooth) dual; the primal iterate implied by the
multipliers satisfies stationarity by construction, which leaves the
per-operation probability sums as the whole KKT residual during the
run.

The scalar subproblem for operation B, with the other multipliers held
at r_x = sum_{B' != B, x in B'} lambda_{B'}, is

    h(t) = sum_{x in B} n(x) / (t + r_x) - 1 = 0,   t > -min_x r_x.

h is strictly decreasing and convex on that domain, so a bracketed
Newton iteration converges without step-size tuning.  Note the domain:
multipliers of operations whose outcomes mostly live in other, heavily
observed operations are legitimately negative at the optimum, so t is
bounded below by the pole, not by zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from .closed_form import MleResult, finish_result
from .diagram import FrequencyTable, GreechieDiagram, Operation, OutcomeId
from .errors import NonConvergence

# Lower-bracket offset above the pole of h; keeps 1/(t - pole) finite.
_POLE_FLOOR = 1e-300

# Once the configured tolerance is met, keep sweeping down to this gap
# (or until the gap stalls at the double-precision floor).
_POLISH_GAP = 1e-13


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rules for the dual ascent.

    kkt_tolerance bounds the final KKT residual; max_sweeps caps the
    number of full passes over the operations; inner_root_tolerance is
    the |h| target of each scalar solve.  Initialization is always the
    deterministic lambda_B = n(B) (deterministic_init is reserved and
    must stay True)."""

    kkt_tolerance: float = 1e-10
    max_sweeps: int = 100_000
    inner_root_tolerance: float = 1e-14
    deterministic_init: bool = True

    def __post_init__(self) -> None:
        if self.kkt_tolerance <= 0 or self.inner_root_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")
        if not self.deterministic_init:
            raise ValueError("only deterministic initialization is supported")


@dataclass(frozen=True)
class DualState:
    """Multipliers keyed by operation.  The sum over the operations
    containing any observed outcome must stay positive, since it is that
    outcome's n(x)/p(x); individual multipliers may have either sign."""

    lam: Mapping[Operation, float]

    def validate(self, diagram: GreechieDiagram, freq: FrequencyTable) -> None:
        for x in diagram.outcomes:
            if freq[x] > 0:
                sigma = sum(self.lam[diagram.operations[j]] for j in diagram.edges_of[x])
                if sigma <= 0:
                    raise ValueError(f"multiplier sum at {x!r} is not positive")


def solve_numeric(
    diagram: GreechieDiagram,
    freq: FrequencyTable,
    config: Optional[SolverConfig] = None,
) -> MleResult:
    """Dual coordinate ascent to a KKT-certified maximizer.

    Requires positive counts (apply zero-count reduction first: with a
    zero-count operation total the scalar equation has no root).  Sweeps
    operations in declaration order; each sweep re-solves every
    multiplier exactly, and the run stops once the largest operation-sum
    gap of the implied primal point drops below kkt_tolerance.  Raises
    NonConvergence with the last gap when the sweep budget runs out."""
    config = config or SolverConfig()
    n_out = len(diagram.outcomes)
    m = len(diagram.operations)
    idx = diagram.outcome_index
    counts = np.empty(n_out)
    for x, i in idx.items():
        if freq[x] <= 0:
            raise ValueError(
                f"numeric solver requires positive counts; {x!r} has {freq[x]}"
            )
        counts[i] = freq[x]
    members = [np.array([idx[x] for x in op]) for op in diagram.operations]

    lam = np.array([counts[mem].sum() for mem in members])
    sigma = np.zeros(n_out)
    for j, mem in enumerate(members):
        sigma[mem] += lam[j]

    # Per-sweep records.  The dual objective (up to a constant) is the
    # certified monotone quantity: each scalar solve minimizes it in one
    # coordinate exactly.  The log-likelihood of the implied point n/sigma
    # is only a diagnostic; while the point is infeasible it can overshoot
    # the optimum and come back down, and it does on most diagrams.
    sweep_loglik: list[float] = []
    sweep_dual: list[float] = []
    gap = np.inf
    prev_gap = np.inf
    converged = False
    sweeps = 0
    for sweeps in range(1, config.max_sweeps + 1):
        for j, mem in enumerate(members):
            r = sigma[mem] - lam[j]
            n_b = counts[mem]
            root = _solve_edge_multiplier(n_b, r, lam[j], config.inner_root_tolerance)
            sigma[mem] += root - lam[j]
            lam[j] = root
        log_sigma = np.log(sigma)
        sweep_loglik.append(float(np.dot(counts, np.log(counts) - log_sigma)))
        sweep_dual.append(float(lam.sum() - np.dot(counts, log_sigma)))
        p_vec = counts / sigma
        gap = max(abs(p_vec[mem].sum() - 1.0) for mem in members)
        if gap < config.kkt_tolerance:
            # Contract met.  Polish further: the likelihood deficit of the
            # returned point scales like (sum of multipliers) * gap, so a
            # gap at the advertised tolerance can still cost ~1e-9 in
            # log-likelihood.  Sweep on until the gap reaches the polish
            # floor or stops improving.
            converged = True
            if gap < _POLISH_GAP or gap >= prev_gap:
                break
        prev_gap = gap
    if not converged:
        raise NonConvergence(config.max_sweeps, float(gap))

    p = {x: float(counts[i] / sigma[i]) for x, i in idx.items()}
    residual = kkt_residual(diagram, freq, p)
    dual = DualState(lam={op: float(lam[j]) for j, op in enumerate(diagram.operations)})
    dual.validate(diagram, freq)
    diagnostics = {
        "sweeps": sweeps,
        "multipliers": [float(v) for v in lam],
        "sweep_loglik": sweep_loglik,
        "sweep_dual": sweep_dual,
        "dual_state": dual,
    }
    return finish_result(
        diagram, freq, p, "numeric", residual, diagnostics, tol=config.kkt_tolerance
    )


def _solve_edge_multiplier(
    n_b: np.ndarray, r: np.ndarray, warm: float, tol: float
) -> float:
    """Root of h(t) = sum n_b/(t + r) - 1 on (pole, inf), pole = -min r.

    h decreases strictly from +inf to 0 on the domain, and the root lies
    in (pole, pole + sum n_b]: at the upper end every term is at most
    n_i / sum n_b.  Newton steps are safeguarded by the shrinking
    bracket; h's convexity makes unclamped Newton from the left
    monotone, so the bracket rarely intervenes."""
    pole = -float(r.min())
    lo = pole + _POLE_FLOOR
    hi = pole + float(n_b.sum())

    def h(t: float) -> float:
        return float((n_b / (t + r)).sum()) - 1.0

    # h(hi) <= 0 by the bound above; equality only when every r equals
    # the pole, in which case hi is the root.
    t = warm if lo < warm < hi else 0.5 * (lo + hi)
    for _ in range(100):
        val = h(t)
        if abs(val) <= tol:
            return t
        if val > 0.0:
            lo = t
        else:
            hi = t
        slope = float((n_b / (t + r) ** 2).sum())  # -h'(t)
        candidate = t + val / slope
        if lo < candidate < hi:
            t = candidate
        else:
            t = 0.5 * (lo + hi)
        if hi - lo <= 1e-16 * max(1.0, abs(hi)):
            return t
    return t


def kkt_residual(
    diagram: GreechieDiagram, freq: FrequencyTable, p: Mapping[OutcomeId, float]
) -> float:
    """Optimality certificate for an assignment.

    Fits multipliers to the stationarity system n(x)/p(x) =
    sum_{B containing x} lambda_B by least squares (any sign), measuring
    the mismatch relatively, per outcome: |p(x)/n(x) * sum lambda_B - 1|.
    The reported residual is the larger of that mismatch and the largest
    per-operation sum gap |sum_B p - 1|.  Zero exactly at the unique
    maximizer.  Outcomes with n(x) = 0 take part only in the sum gaps;
    their optimal probability is 0 and stationarity does not constrain
    them.  Requires p(x) > 0 wherever n(x) > 0."""
    rows = [x for x in diagram.outcomes if freq[x] > 0]
    for x in rows:
        if p[x] <= 0:
            raise ValueError(f"p must be positive where counts are; p({x!r}) <= 0")
    m = len(diagram.operations)
    mat = np.zeros((len(rows), m))
    for i, x in enumerate(rows):
        scale = float(p[x]) / freq[x]
        for j in diagram.edges_of[x]:
            mat[i, j] = scale
    target = np.ones(len(rows))
    lam, *_ = np.linalg.lstsq(mat, target, rcond=None)
    stationarity = float(np.max(np.abs(mat @ lam - target))) if rows else 0.0
    gaps = max(
        abs(float(sum(p[x] for x in op)) - 1.0) for op in diagram.operations
    )
    return max(stationarity, gaps)
