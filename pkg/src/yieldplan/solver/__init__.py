"""Self-contained exact LP/MIP kernel.

``model`` holds the generic maximization model and solve results,
``simplex`` a bounded-variable primal/dual simplex with duality
certificates, ``branch_bound`` a deterministic best-first search over
binary variables with support for lazily separated rows, and
``lpformat`` a text dump for cross-checking models externally.
"""

from yieldplan.solver.branch_bound import solve_mip
from yieldplan.solver.lpformat import write_lp_text
from yieldplan.solver.model import LinearModel, ModelError, SolveResult, SolveStats, Status
from yieldplan.solver.simplex import solve_lp

__all__ = [
    "LinearModel",
    "ModelError",
    "SolveResult",
    "SolveStats",
    "Status",
    "solve_lp",
    "solve_mip",
    "write_lp_text",
]
