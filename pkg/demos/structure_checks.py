"""What the structural validators accept and reject.

Shows the separation rules on a few small diagrams: a triangle of
pairwise-overlapping operations (too short a cycle for any quantum
logic), the four-cycle (fine for orthomodular posets, too short for
lattices), and a pair of operations sharing all but one outcome.
"""

from greechie_mle import check_g2, validate_diagram
from greechie_mle.shapes import four_cycle, g1_violation, tennis, triangle

for name, diagram in [
    ("two overlapping triples", tennis()),
    ("triangle", triangle()),
    ("four-cycle", four_cycle()),
    ("near-duplicate pair", g1_violation()),
]:
    report = validate_diagram(diagram)
    print(f"--- {name}: {'valid' if report.passed else 'rejected'}")
    for v in report.violations:
        print(f"  {v.rule}: {v.message}")

# The four-cycle separates the two G2 targets: its shortest cycle has
# length exactly 4.
fc = four_cycle()
print("\nfour-cycle, poset rule:  ", "pass" if check_g2(fc, target="omp").passed else "fail")
print("four-cycle, lattice rule:", "pass" if check_g2(fc, target="oml").passed else "fail")
