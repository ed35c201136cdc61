"""Exception types shared across the package.

Construction errors carry the offending object so callers can report
precise diagnostics without re-deriving them.
"""

from __future__ import annotations


class GreechieError(Exception):
    """Base class for all errors raised by this package."""


class DiagramError(GreechieError):
    """A diagram definition is malformed."""


class DuplicateOutcome(DiagramError):
    def __init__(self, outcome: str, where: str = "outcome list"):
        self.outcome = outcome
        super().__init__(f"duplicate outcome {outcome!r} in {where}")


class DuplicateEdge(DiagramError):
    def __init__(self, members: tuple[str, ...]):
        self.members = members
        super().__init__(f"two operations share the member set {set(members)!r}")


class EmptyEdge(DiagramError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"operation #{index} has no members")


class UncoveredOutcome(DiagramError):
    def __init__(self, outcome: str):
        self.outcome = outcome
        super().__init__(f"outcome {outcome!r} belongs to no operation")


class UnknownMember(DiagramError):
    def __init__(self, member: str, index: int):
        self.member = member
        self.index = index
        super().__init__(f"operation #{index} names undeclared outcome {member!r}")


class IntersectionTooLarge(GreechieError):
    """Two operations share more than one outcome, so the cycle-length
    criteria are not applicable to this diagram.  This does not mean the
    diagram is invalid as a hypergraph."""

    def __init__(self, edge_a: tuple[str, ...], edge_b: tuple[str, ...]):
        self.edge_a = edge_a
        self.edge_b = edge_b
        shared = set(edge_a) & set(edge_b)
        super().__init__(
            f"operations {set(edge_a)!r} and {set(edge_b)!r} share {sorted(shared)!r}; "
            "cycle criteria require pairwise intersections of at most one outcome"
        )


class EmptyAfterReduction(GreechieError):
    """Every recorded count is zero, so nothing remains to estimate."""


class InfeasibleReduction(GreechieError):
    """Zero-count removal emptied an operation.  The normalization
    constraint of an empty operation cannot be satisfied, so estimation
    on the original diagram is rejected rather than silently relaxed."""

    def __init__(self, edges: list[tuple[str, ...]]):
        self.edges = edges
        super().__init__(
            f"{len(edges)} operation(s) lost every member to zero counts: "
            + "; ".join(str(set(e)) for e in edges)
        )


class EstimationError(GreechieError):
    """A solver could not produce an estimate."""


class ZeroTotal(EstimationError):
    def __init__(self) -> None:
        super().__init__("all counts are zero, the classical estimate is undefined")


class ZeroComponent(EstimationError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(
            f"connected component #{index} has zero total count; "
            "its internal probabilities are undetermined"
        )


class ZeroFactor(EstimationError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(
            f"product factor #{index} has zero total count; "
            "its conditional probabilities are undetermined"
        )


class NoRootInUnitInterval(EstimationError):
    """The splitting-parameter polynomial has no admissible root.  With
    positive counts and nonempty interior blocks exactly one root lies in
    (0, 1), so this signals a bug or a violated precondition."""

    def __init__(self, roots: tuple[float, ...]):
        self.roots = roots
        super().__init__(f"no splitting parameter in (0, 1); candidate roots {roots!r}")


class NonConvergence(EstimationError):
    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"no convergence after {iterations} iterations, last residual {residual:.3e}"
        )


class NoClosedForm(EstimationError):
    """Raised when a closed-form solution was demanded but the plan
    contains a numeric leaf."""

    def __init__(self, outcomes: tuple[str, ...]):
        self.outcomes = outcomes
        super().__init__(
            "no closed form: a numeric-only subproblem covers outcomes "
            + ", ".join(outcomes)
        )


class DegeneratePolytope(GreechieError):
    """The feasible set is a single point; there is nothing to sample.
    The unique point is attached for callers that can use it directly."""

    def __init__(self, point):
        self.point = point
        super().__init__("feasible polytope is zero-dimensional")
