"""Ground-truth enumeration, expected-value benchmarks, and the value of
the stochastic solution.

The enumeration oracle walks every complete level assignment, fixes the
distributions it enforces, and solves the remaining continuous sales
problem; it is the reference every other method is checked against.
Expected-value variants collapse yields, demands, or both to their means,
and the resulting first-stage plans are re-evaluated under the true
distributions to price what modeling each source of uncertainty is worth.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from yieldplan import recourse
from yieldplan.instance import (
    JointDistribution,
    ProductionInstance,
    ProductionLevel,
    ScenarioRealization,
    require_valid,
)
from yieldplan.solution import MasterSolution
from yieldplan.solver.model import LinearModel, Status
from yieldplan.solver.simplex import solve_lp

EV_VARIANTS = ("supply", "demand", "full")


class OracleBudgetError(RuntimeError):
    """The level-assignment space is too large to enumerate."""


# ---------------------------------------------------------------------------
# Hand-checkable fixture
# ---------------------------------------------------------------------------

def micro_fixture() -> ProductionInstance:
    """One product, one facility, two levels, two scenarios per distribution.

    Small enough that the optimum (objective 63 at x=10 on the upper level)
    and every derived bound can be verified by hand; used throughout the
    test suite as the canonical fixture.
    """
    return ProductionInstance(
        products=("p1",),
        facilities=("f1",),
        levels=(((ProductionLevel(0.0, 10.0), ProductionLevel(10.0, 20.0)),),),
        capacity=(20.0,),
        unit_cost=((6.0,),),
        full_price=(15.0,),
        salvage_price=(2.0,),
        distributions=(
            (
                JointDistribution(
                    id=0,
                    enforced_level=(0,),
                    scenarios=(
                        ScenarioRealization(0.5, (1.0,), 8.0),
                        ScenarioRealization(0.5, (0.5,), 8.0),
                    ),
                ),
                JointDistribution(
                    id=1,
                    enforced_level=(1,),
                    scenarios=(
                        ScenarioRealization(0.5, (1.0,), 8.0),
                        ScenarioRealization(0.5, (0.9,), 8.0),
                    ),
                ),
            ),
        ),
    )


def skewed_fixture() -> ProductionInstance:
    """Variant where averaging the yields flatters the risky upper level:
    the deterministic-yield plan picks the upper level while the stochastic
    optimum stays on the lower one. Exercises the re-evaluation path that
    must read the distribution from the evaluated plan, not from the
    stochastic optimum."""
    return ProductionInstance(
        products=("p1",),
        facilities=("f1",),
        levels=(((ProductionLevel(0.0, 10.0), ProductionLevel(10.0, 20.0)),),),
        capacity=(20.0,),
        unit_cost=((3.0,),),
        full_price=(15.0,),
        salvage_price=(2.0,),
        distributions=(
            (
                JointDistribution(
                    id=0,
                    enforced_level=(0,),
                    scenarios=(ScenarioRealization(1.0, (0.55,), 8.0),),
                ),
                JointDistribution(
                    id=1,
                    enforced_level=(1,),
                    scenarios=(
                        ScenarioRealization(0.5, (1.0,), 8.0),
                        ScenarioRealization(0.5, (0.1,), 8.0),
                    ),
                ),
            ),
        ),
    )


# ---------------------------------------------------------------------------
# Enumeration oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OracleResult:
    solution: MasterSolution
    objective: float
    assignments_tried: int
    lp_solves: int


def _assignment_space(inst: ProductionInstance) -> int:
    size = 1
    for p in range(inst.n_products):
        for f in range(inst.n_facilities):
            size *= len(inst.levels[p][f])
    return size


def _sales_lp(
    inst: ProductionInstance, dists: Sequence[int], levels: tuple[tuple[int, ...], ...]
) -> tuple[LinearModel, list[list[int]]]:
    """Continuous sales problem for fixed levels and distributions: choose
    allocations within the level bounds plus per-scenario sales splits."""
    P, F = inst.n_products, inst.n_facilities
    m = LinearModel(name="sales")
    x_idx = [
        [
            m.add_variable(
                lb=inst.levels[p][f][levels[p][f]].lower,
                ub=min(inst.capacity[f], inst.levels[p][f][levels[p][f]].upper),
                obj=-inst.unit_cost[p][f],
                name=f"x_{p}_{f}",
            )
            for f in range(F)
        ]
        for p in range(P)
    ]
    for f in range(F):
        m.add_row([(x_idx[p][f], 1.0) for p in range(P)], "<=", inst.capacity[f], name=f"cap_{f}")
    for p in range(P):
        dist = inst.distributions[p][dists[p]]
        for s, sc in enumerate(dist.scenarios):
            z = m.add_variable(lb=0.0, name=f"z_{p}_{s}")
            w = m.add_variable(lb=0.0, ub=sc.demand, obj=sc.probability * inst.full_price[p], name=f"w_{p}_{s}")
            o = m.add_variable(lb=0.0, obj=sc.probability * inst.salvage_price[p], name=f"o_{p}_{s}")
            m.add_row(
                [(z, 1.0)] + [(x_idx[p][f], -sc.yields[f]) for f in range(F)],
                "=", 0.0, name=f"inv_{p}_{s}",
            )
            m.add_row([(w, 1.0), (o, 1.0), (z, -1.0)], "=", 0.0, name=f"bal_{p}_{s}")
    return m, x_idx


def solve_oracle(inst: ProductionInstance, budget: int = 100_000) -> OracleResult:
    """Enumerate every complete level assignment, solve the continuous sales
    problem for each, and return the best plan found. Ties keep the first
    (lexicographically smallest) assignment."""
    require_valid(inst)
    space = _assignment_space(inst)
    if space > budget:
        raise OracleBudgetError(
            f"{space} level assignments exceed the enumeration budget of {budget}"
        )
    P, F = inst.n_products, inst.n_facilities
    pairs = [(p, f) for p in range(P) for f in range(F)]
    best_obj = -np.inf
    best: MasterSolution | None = None
    lp_solves = 0
    tried = 0
    for combo in itertools.product(*(range(len(inst.levels[p][f])) for p, f in pairs)):
        tried += 1
        levels = tuple(
            tuple(combo[p * F + f] for f in range(F)) for p in range(P)
        )
        try:
            dists = [inst.distribution_for_assignment(p, levels[p]) for p in range(P)]
        except LookupError:
            continue
        model, x_idx = _sales_lp(inst, dists, levels)
        res = solve_lp(model)
        lp_solves += 1
        if res.status is not Status.OPTIMAL:
            continue  # capacity cannot accommodate the level minima
        if res.objective > best_obj + 1e-12:
            x = np.array([[res.x[x_idx[p][f]] for f in range(F)] for p in range(P)])
            mu = np.array([
                recourse.expected_revenue_for_distribution(inst, p, dists[p], x[p])
                for p in range(P)
            ])
            best_obj = res.objective
            best = MasterSolution(x=x, levels=levels, mu=mu, objective=res.objective)
    if best is None:
        raise OracleBudgetError("no feasible level assignment found")
    return OracleResult(
        solution=best, objective=best_obj, assignments_tried=tried, lp_solves=lp_solves
    )


# ---------------------------------------------------------------------------
# Expected-value problems
# ---------------------------------------------------------------------------

def expected_value_instance(inst: ProductionInstance, variant: str) -> ProductionInstance:
    """Instance with one or both random sources collapsed to expectations.

    supply: each distribution keeps its demand scenarios, yields replaced by
            the per-facility expected yield of that distribution.
    demand: yield scenarios kept, demands replaced by the distribution's
            expected demand.
    full:   one scenario per distribution carrying both expectations.
    """
    if variant not in EV_VARIANTS:
        raise ValueError(f"unknown expected-value variant {variant!r}")
    require_valid(inst)
    new_dists: list[tuple[JointDistribution, ...]] = []
    for p in range(inst.n_products):
        per_product = []
        for dist in inst.distributions[p]:
            pi = np.array([sc.probability for sc in dist.scenarios])
            Y = np.array([sc.yields for sc in dist.scenarios])
            D = np.array([sc.demand for sc in dist.scenarios])
            mean_yield = tuple(float(v) for v in pi @ Y)
            mean_demand = float(pi @ D)
            if variant == "supply":
                scenarios = tuple(
                    ScenarioRealization(float(pi[s]), mean_yield, float(D[s]))
                    for s in range(len(pi))
                )
            elif variant == "demand":
                scenarios = tuple(
                    ScenarioRealization(float(pi[s]), tuple(float(v) for v in Y[s]), mean_demand)
                    for s in range(len(pi))
                )
            else:
                scenarios = (ScenarioRealization(1.0, mean_yield, mean_demand),)
            per_product.append(replace(dist, scenarios=scenarios))
        new_dists.append(tuple(per_product))
    return replace(inst, distributions=tuple(new_dists), meta=None)


# ---------------------------------------------------------------------------
# Value of the stochastic solution
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VssReport:
    v_sp: float
    v_ev_supply: float | None
    v_ev_demand: float | None
    v_ev_full: float | None
    vss_supply: float | None
    vss_demand: float | None
    vss_full: float | None
    ratio_defined: bool

    def csv_row(self, instance_id: str) -> dict:
        def fmt(v):
            return "" if v is None else repr(float(v))

        return {
            "instance": instance_id,
            "v_sp": repr(float(self.v_sp)),
            "v_ev_supply": fmt(self.v_ev_supply),
            "v_ev_demand": fmt(self.v_ev_demand),
            "v_ev_full": fmt(self.v_ev_full),
            "vss_supply": fmt(self.vss_supply),
            "vss_demand": fmt(self.vss_demand),
            "vss_full": fmt(self.vss_full),
            "ratio_defined": str(self.ratio_defined).lower(),
        }


def _default_ev_solver(inst: ProductionInstance) -> MasterSolution:
    from yieldplan.benders import solve_branch_and_cut

    run = solve_branch_and_cut(inst, epsilon=0.0, use_vi2=True)
    if run.solution is None:
        raise RuntimeError(f"expected-value solve failed with status {run.status}")
    return run.solution


def compute_vss(
    inst: ProductionInstance,
    sp_objective: float,
    variants: Sequence[str] = EV_VARIANTS,
    solver: Callable[[ProductionInstance], MasterSolution] | None = None,
) -> VssReport:
    """Solve each expected-value variant, re-evaluate its first stage under
    the true distributions, and report v_EV plus the relative loss versus
    the stochastic optimum ``sp_objective``.

    The re-evaluation reads the enforced distribution from the
    expected-value plan itself, which may differ from the distribution the
    stochastic optimum enforces. When ``sp_objective`` is not positive the
    ratios are undefined and the report carries absolute differences.
    """
    solver = solver or _default_ev_solver
    v_ev: dict[str, float | None] = {v: None for v in EV_VARIANTS}
    for variant in variants:
        ev_inst = expected_value_instance(inst, variant)
        sol = solver(ev_inst)
        v_ev[variant] = recourse.evaluate_full(inst, sol.x, sol.levels)
    ratio_defined = sp_objective > 0.0

    def ratio(v):
        if v is None:
            return None
        if ratio_defined:
            return (sp_objective - v) / sp_objective
        return sp_objective - v  # absolute fallback

    return VssReport(
        v_sp=sp_objective,
        v_ev_supply=v_ev["supply"],
        v_ev_demand=v_ev["demand"],
        v_ev_full=v_ev["full"],
        vss_supply=ratio(v_ev["supply"]),
        vss_demand=ratio(v_ev["demand"]),
        vss_full=ratio(v_ev["full"]),
        ratio_defined=ratio_defined,
    )
