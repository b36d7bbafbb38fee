"""Two-stage stochastic production planning with decision-dependent yield uncertainty.

A planner sources multiple products from capacitated facilities. For each
(product, facility) pair a production level is chosen, and the combination of
levels across facilities selects the joint probability distribution of that
product's yields and demand. The package builds and solves the exact
linearized deterministic equivalent, runs a decomposition scheme based on
per-product revenue approximations refined by optimality cuts, generates
random benchmark instances, and measures the value of the stochastic solution.
"""

from yieldplan.instance import (
    JointDistribution,
    ProductionInstance,
    ProductionLevel,
    ScenarioRealization,
    read_instance,
    validate_instance,
    write_instance,
)
from yieldplan.solution import MasterSolution

__version__ = "0.1.0"

__all__ = [
    "JointDistribution",
    "MasterSolution",
    "ProductionInstance",
    "ProductionLevel",
    "ScenarioRealization",
    "read_instance",
    "validate_instance",
    "write_instance",
]
