"""Two overlapping three-outcome measurements, estimated exactly.

The shared outcome e couples the two operations, so the naive
frequency n(x)/N is not feasible: the two empirical edge sums
disagree.  The estimator splits the shared mass so that each
operation's count/probability ratio is constant across its private
outcomes, and the answer stays in exact rationals.
"""

from greechie_mle import build_diagram, estimate

diagram = build_diagram(
    ["a", "c", "e", "b", "d"],
    [["a", "c", "e"], ["b", "d", "e"]],
)
counts = {"a": 10, "c": 30, "e": 40, "b": 20, "d": 40}

result = estimate(diagram, counts)

print(f"method: {result.method}")
for x in diagram.outcomes:
    print(f"  p({x}) = {result.p[x]}  (~{float(result.p[x]):.6f})")
print(f"log-likelihood: {result.log_lik:.6f}")

# Inside each operation the ratio n(x)/p(x) is a single constant.
for op in diagram.operations:
    ratios = {x: counts[x] / result.p[x] for x in op if x != "e"}
    print(f"  n/p on {op}: {sorted(set(ratios.values()))}")
