"""One transportation problem, three exact solvers, one answer.

The MODI simplex, the exhaustive enumerator and the dense LP tableau all
return the same lexicographically smallest optimal flow.
"""

import time

from uavcover import (build_lp_model, solve_lp_simplex, solve_transportation_bruteforce,
                      solve_transportation_simplex)
from uavcover.transport import format_transportation, make_problem

# three UAV groups, four targets; group 1 cannot reach target 3 in time
tp = make_problem(supplies=[2, 2, 1], demands=[1, 2, 1, 2],
                  cost=[[4, 7, 3, 9], [6, 2, 5, 1], [3, 3, 8, 4]],
                  feasible=[[1, 1, 1, 1], [1, 1, 1, 0], [1, 1, 1, 1]])
solvers = {
    "transportation simplex": solve_transportation_simplex,
    "brute force": solve_transportation_bruteforce,
    "LP tableau": lambda p: solve_lp_simplex(build_lp_model(p), p),
}
for name, solve in solvers.items():
    t0 = time.perf_counter()
    flow = solve(tp)
    print(f"{name:>22}: objective {flow.objective:g} in {1e3 * (time.perf_counter() - t0):.2f} ms")

print()
print(format_transportation(tp, solve_transportation_simplex(tp)))
