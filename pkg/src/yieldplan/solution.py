"""First-stage solution container shared by all solution methods."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from yieldplan.instance import ProductionInstance


@dataclass(frozen=True, eq=False)
class MasterSolution:
    """A complete first-stage decision: allocations x[p, f], the chosen level
    per (product, facility), the per-product expected-revenue value mu, and
    the resulting objective."""

    x: np.ndarray                     # (P, F) allocations
    levels: tuple[tuple[int, ...], ...]  # level index per (p, f)
    mu: np.ndarray                    # (P,) expected revenue per product
    objective: float

    def enforced_distributions(self, inst: ProductionInstance) -> tuple[int, ...]:
        return tuple(
            inst.distribution_for_assignment(p, self.levels[p])
            for p in range(inst.n_products)
        )

    def to_json(self, inst: ProductionInstance) -> dict[str, Any]:
        return {
            "products": list(inst.products),
            "facilities": list(inst.facilities),
            "objective": float(self.objective),
            "x": [[float(v) for v in row] for row in np.asarray(self.x)],
            "levels": [list(row) for row in self.levels],
            "distribution": list(self.enforced_distributions(inst)),
            "mu": [float(v) for v in np.asarray(self.mu)],
        }
