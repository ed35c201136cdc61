"""Simulate trials from a known assignment, then recover it.

Each trial picks an operation by a coin flip and an outcome inside it
from the true probabilities.  At 10^5 trials the estimator lands
within about three binomial standard errors of the truth.
"""

from fractions import Fraction

from greechie_mle import build_diagram, estimate
from greechie_mle.sampler import OperationPolicy, sample_outcomes

diagram = build_diagram(
    ["a", "c", "e", "b", "d"],
    [["a", "c", "e"], ["b", "d", "e"]],
)
truth = {
    "a": Fraction(5, 28),
    "c": Fraction(15, 28),
    "e": Fraction(2, 7),
    "b": Fraction(5, 21),
    "d": Fraction(10, 21),
}

policy = OperationPolicy.aligned(diagram, [0.5, 0.5])
counts = sample_outcomes(diagram, truth, policy, trial_count=100_000, seed=42)
print("sampled counts:", dict(counts))

result = estimate(diagram, counts)
print(f"{'outcome':8} {'truth':>10} {'estimate':>10} {'error':>9}")
for x in diagram.outcomes:
    t = float(truth[x])
    e = float(result.p[x])
    print(f"{x:8} {t:10.5f} {e:10.5f} {abs(e - t):9.2e}")
