"""Closed-form second-stage evaluation and the analytic instance bounds.

Once first-stage decisions fix the enforced distribution and the available
inventory per scenario, the optimal sales split is known in closed form:
sell up to demand at full price, salvage the rest. That closed form, the
scenario partition it induces (inventory above vs. not above demand), and
the a-priori revenue/inventory caps derived from it drive both the
decomposition cuts and the relaxation strengthening.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from yieldplan.instance import JointDistribution, ProductionInstance, require_valid

FEAS_TOL = 1e-6


class InfeasibleDecisionError(ValueError):
    """A first-stage decision violates capacity or level-bound constraints."""


@dataclass(frozen=True)
class ScenarioPartition:
    """Scenario split for one (product, distribution, allocation): ``up``
    holds scenarios whose inventory strictly exceeds demand, ``down`` the
    rest (ties count as covered demand)."""

    up: frozenset[int]
    down: frozenset[int]


@dataclass(frozen=True, eq=False)
class ProductRecourse:
    """Optimal second-stage outcome of one product under its enforced
    distribution: per-scenario inventory/sales/overage/revenue and the
    probability-weighted expected revenue."""

    distribution: int
    inventory: np.ndarray
    full_price_sales: np.ndarray
    overage: np.ndarray
    revenue: np.ndarray
    expected_revenue: float


@dataclass(frozen=True, eq=False)
class RecourseEvaluation:
    products: tuple[ProductRecourse, ...]

    @property
    def expected_revenues(self) -> np.ndarray:
        return np.array([pr.expected_revenue for pr in self.products])


@dataclass(frozen=True, eq=False)
class InstanceBounds:
    """Analytic caps used by the relaxations.

    inventory_cap[p][d][s]  largest inventory reachable while distribution d
                            is enforced (level-specific upper volumes)
    mccormick_cap[p][d][s]  largest inventory over any level choice; bounds
                            the overage linearization variables
    revenue_cap[p]          largest expected revenue over all distributions
    max_yield[p, f]         largest yield realization anywhere
    expected_yield[p][d]    per-facility expected yield under distribution d
    """

    inventory_cap: tuple[tuple[np.ndarray, ...], ...]
    mccormick_cap: tuple[tuple[np.ndarray, ...], ...]
    revenue_cap: np.ndarray
    max_yield: np.ndarray
    expected_yield: tuple[tuple[np.ndarray, ...], ...]

    def best_expected_yield(self) -> np.ndarray:
        """max over distributions of the expected yield, per (p, f)."""
        P, F = self.max_yield.shape
        out = np.zeros((P, F))
        for p in range(P):
            out[p] = np.max(np.stack(self.expected_yield[p]), axis=0)
        return out


# ---------------------------------------------------------------------------
# Scenario-level closed form
# ---------------------------------------------------------------------------

def scenario_revenue(price: float, salvage: float, demand: float, inventory: float) -> float:
    """Optimal sales revenue for one scenario given available inventory.

    Equals the optimum of the two-variable sales LP: inventory up to demand
    earns the full price, the remainder earns the salvage price.
    """
    if demand <= inventory:
        return price * demand + salvage * (inventory - demand)
    return price * inventory


def scenario_inventory(dist: JointDistribution, s: int, x_p: Sequence[float]) -> float:
    """Finished-goods inventory of one scenario: yield-weighted allocations."""
    sc = dist.scenarios[s]
    return float(np.dot(sc.yields, np.asarray(x_p, dtype=float)))


def _dist_arrays(dist: JointDistribution) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(probabilities, yields[s, f], demands) as dense arrays."""
    pi = np.array([sc.probability for sc in dist.scenarios])
    Y = np.array([sc.yields for sc in dist.scenarios], dtype=float)
    D = np.array([sc.demand for sc in dist.scenarios])
    return pi, Y, D


def inventories(dist: JointDistribution, x_p: Sequence[float]) -> np.ndarray:
    _, Y, _ = _dist_arrays(dist)
    return Y @ np.asarray(x_p, dtype=float)


def partition(inst: ProductionInstance, p: int, d: int, x_p: Sequence[float]) -> ScenarioPartition:
    """Split the scenarios of distribution ``d`` by whether inventory
    strictly exceeds demand at allocation ``x_p``. Ties go down."""
    dist = inst.distributions[p][d]
    z = inventories(dist, x_p)
    D = np.array([sc.demand for sc in dist.scenarios])
    up = frozenset(int(s) for s in np.nonzero(D < z)[0])
    down = frozenset(range(len(dist.scenarios))) - up
    return ScenarioPartition(up=up, down=down)


def expected_revenue(
    inst: ProductionInstance, p: int, x_p: Sequence[float], level_assignment: Sequence[int]
) -> float:
    """Expected revenue of product ``p`` under the distribution enforced by
    ``level_assignment``, using the closed-form scenario optimum."""
    d = inst.distribution_for_assignment(p, level_assignment)
    return expected_revenue_for_distribution(inst, p, d, x_p)


def expected_revenue_for_distribution(
    inst: ProductionInstance, p: int, d: int, x_p: Sequence[float]
) -> float:
    dist = inst.distributions[p][d]
    pi, Y, D = _dist_arrays(dist)
    z = Y @ np.asarray(x_p, dtype=float)
    price, salvage = inst.full_price[p], inst.salvage_price[p]
    rev = np.where(D <= z, price * D + salvage * (z - D), price * z)
    return float(pi @ rev)


def product_recourse(
    inst: ProductionInstance, p: int, x_p: Sequence[float], level_assignment: Sequence[int]
) -> ProductRecourse:
    d = inst.distribution_for_assignment(p, level_assignment)
    dist = inst.distributions[p][d]
    pi, Y, D = _dist_arrays(dist)
    z = Y @ np.asarray(x_p, dtype=float)
    w = np.minimum(D, z)
    o = z - w
    rev = inst.full_price[p] * w + inst.salvage_price[p] * o
    return ProductRecourse(
        distribution=d,
        inventory=z,
        full_price_sales=w,
        overage=o,
        revenue=rev,
        expected_revenue=float(pi @ rev),
    )


# ---------------------------------------------------------------------------
# Full first-stage evaluation
# ---------------------------------------------------------------------------

def _check_first_stage(inst: ProductionInstance, x: np.ndarray, levels) -> None:
    P, F = inst.n_products, inst.n_facilities
    if x.shape != (P, F):
        raise InfeasibleDecisionError(f"x has shape {x.shape}, expected {(P, F)}")
    for f in range(F):
        cap = inst.capacity[f]
        used = float(x[:, f].sum())
        if used > cap + FEAS_TOL * (1.0 + abs(cap)):
            raise InfeasibleDecisionError(
                f"capacity exceeded at {inst.facilities[f]}: {used} > {cap}"
            )
    for p in range(P):
        if len(levels[p]) != F:
            raise InfeasibleDecisionError(f"level assignment of {inst.products[p]} is incomplete")
        for f in range(F):
            l = levels[p][f]
            if not 0 <= l < len(inst.levels[p][f]):
                raise InfeasibleDecisionError(
                    f"bad level index {l} at ({inst.products[p]}, {inst.facilities[f]})"
                )
            level = inst.levels[p][f][l]
            ub = min(inst.capacity[f], level.upper)
            v = float(x[p, f])
            if v < level.lower - FEAS_TOL * (1.0 + abs(level.lower)) or v > ub + FEAS_TOL * (1.0 + abs(ub)):
                raise InfeasibleDecisionError(
                    f"allocation {v} outside level bounds [{level.lower}, {ub}] "
                    f"at ({inst.products[p]}, {inst.facilities[f]})"
                )
        if x[p].min() < -FEAS_TOL:
            raise InfeasibleDecisionError(f"negative allocation for {inst.products[p]}")


def evaluate_recourse(inst: ProductionInstance, x, levels) -> RecourseEvaluation:
    x = np.asarray(x, dtype=float)
    _check_first_stage(inst, x, levels)
    return RecourseEvaluation(
        products=tuple(
            product_recourse(inst, p, x[p], levels[p]) for p in range(inst.n_products)
        )
    )


def evaluate_full(inst: ProductionInstance, x, levels) -> float:
    """True objective of a first-stage decision: expected revenues of the
    enforced distributions minus production cost. Raises on an infeasible
    (x, levels) pair."""
    x = np.asarray(x, dtype=float)
    _check_first_stage(inst, x, levels)
    cost = float(np.sum(np.asarray(inst.unit_cost) * x))
    revenue = sum(
        expected_revenue(inst, p, x[p], levels[p]) for p in range(inst.n_products)
    )
    return revenue - cost


# ---------------------------------------------------------------------------
# A-priori bounds
# ---------------------------------------------------------------------------

def compute_bounds(inst: ProductionInstance) -> InstanceBounds:
    require_valid(inst)
    P, F = inst.n_products, inst.n_facilities
    inv_cap: list[tuple[np.ndarray, ...]] = []
    mc_cap: list[tuple[np.ndarray, ...]] = []
    exp_yield: list[tuple[np.ndarray, ...]] = []
    revenue_cap = np.zeros(P)
    max_yield = np.zeros((P, F))

    for p in range(P):
        # Highest order volume per facility irrespective of the level chosen;
        # never exceeds facility capacity.
        any_level_vol = np.array([
            min(inst.capacity[f], max(lv.upper for lv in inst.levels[p][f]))
            for f in range(F)
        ])
        inv_p, mc_p, ey_p = [], [], []
        best = 0.0
        for dist in inst.distributions[p]:
            pi, Y, D = _dist_arrays(dist)
            # Volume cap per facility under the levels this distribution enforces.
            enforced_vol = np.array([
                min(inst.capacity[f], inst.levels[p][f][dist.enforced_level[f]].upper)
                for f in range(F)
            ])
            z_bar = Y @ enforced_vol
            n_cap = Y @ any_level_vol
            cap_rev = float(pi @ (
                inst.full_price[p] * np.minimum(D, z_bar)
                + inst.salvage_price[p] * np.maximum(z_bar - D, 0.0)
            ))
            best = max(best, cap_rev)
            inv_p.append(z_bar)
            mc_p.append(n_cap)
            ey_p.append(pi @ Y)
            max_yield[p] = np.maximum(max_yield[p], Y.max(axis=0))
        revenue_cap[p] = best
        inv_cap.append(tuple(inv_p))
        mc_cap.append(tuple(mc_p))
        exp_yield.append(tuple(ey_p))

    return InstanceBounds(
        inventory_cap=tuple(inv_cap),
        mccormick_cap=tuple(mc_cap),
        revenue_cap=revenue_cap,
        max_yield=max_yield,
        expected_yield=tuple(exp_yield),
    )
