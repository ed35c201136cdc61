"""Maximum likelihood estimation on finite quantum event structures.

Event structures are finite hypergraphs: outcomes (vertices) grouped
into operations (edges), each operation's probabilities summing to one.
Given observed outcome counts, the library computes the maximum
likelihood probability assignment, in closed form where the structure
decomposes into operations, horizontal sums, products, and chains, and
by a certified concave solver otherwise.
"""

from .closed_form import (
    BlockStats,
    MleResult,
    SplittingParameters,
    elimination_c1,
    estimate,
    execute_plan,
    finish_result,
    solve_chain2,
    solve_chain_k,
    solve_classical,
    solve_horizontal,
    solve_product,
)
from .decompose import (
    Chain,
    ChainDescriptor,
    ClassicalLeaf,
    DecompositionTree,
    HorizontalSum,
    NumericLeaf,
    Product,
    build_plan,
    connected_components,
    detect_chain,
    factor_product,
    plan_summary,
    plan_verdict,
)
from .diagram import (
    GreechieDiagram,
    Reduction,
    ValidationReport,
    Violation,
    build_diagram,
    check_frequencies,
    check_g1,
    check_g2,
    check_probability,
    log_likelihood,
    minimum_cycle_length,
    reduce_zero_counts,
    validate_diagram,
)
from .errors import (
    DegeneratePolytope,
    DiagramError,
    DuplicateEdge,
    DuplicateOutcome,
    EmptyAfterReduction,
    EmptyEdge,
    EstimationError,
    GreechieError,
    InfeasibleReduction,
    IntersectionTooLarge,
    NoClosedForm,
    NonConvergence,
    NoRootInUnitInterval,
    UncoveredOutcome,
    UnknownMember,
    ZeroComponent,
    ZeroFactor,
    ZeroTotal,
)
from .numeric import DualState, SolverConfig, kkt_residual, solve_numeric
from .oracle import (
    OracleBudget,
    brute_force_mle,
    incidence_matrix,
    interior_point,
    nullspace_basis,
    sample_feasible,
)
from .sampler import OperationPolicy, sample_outcomes
from . import shapes

__version__ = "0.1.0"

__all__ = [
    "BlockStats",
    "Chain",
    "ChainDescriptor",
    "ClassicalLeaf",
    "DecompositionTree",
    "DegeneratePolytope",
    "DiagramError",
    "DualState",
    "DuplicateEdge",
    "DuplicateOutcome",
    "EmptyAfterReduction",
    "EmptyEdge",
    "EstimationError",
    "GreechieDiagram",
    "GreechieError",
    "HorizontalSum",
    "InfeasibleReduction",
    "IntersectionTooLarge",
    "MleResult",
    "NoClosedForm",
    "NoRootInUnitInterval",
    "NonConvergence",
    "NumericLeaf",
    "OperationPolicy",
    "OracleBudget",
    "Product",
    "Reduction",
    "SolverConfig",
    "SplittingParameters",
    "UncoveredOutcome",
    "UnknownMember",
    "ValidationReport",
    "Violation",
    "ZeroComponent",
    "ZeroFactor",
    "ZeroTotal",
    "brute_force_mle",
    "build_diagram",
    "build_plan",
    "check_frequencies",
    "check_g1",
    "check_g2",
    "check_probability",
    "connected_components",
    "detect_chain",
    "elimination_c1",
    "estimate",
    "execute_plan",
    "factor_product",
    "finish_result",
    "incidence_matrix",
    "interior_point",
    "kkt_residual",
    "log_likelihood",
    "minimum_cycle_length",
    "nullspace_basis",
    "plan_summary",
    "plan_verdict",
    "reduce_zero_counts",
    "sample_feasible",
    "sample_outcomes",
    "shapes",
    "solve_chain2",
    "solve_chain_k",
    "solve_classical",
    "solve_horizontal",
    "solve_numeric",
    "solve_product",
    "validate_diagram",
]
