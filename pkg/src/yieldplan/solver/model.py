"""Generic maximization model and solve-result containers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np


class ModelError(ValueError):
    """The model is malformed (bad references, non-finite data, ...)."""


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    TIME_LIMIT = "TimeLimit"
    GAP_LIMIT = "GapLimit"

    def __str__(self) -> str:
        return self.value


@dataclass
class Row:
    cols: list[int]
    vals: list[float]
    sense: str  # one of "<=", "=", ">="
    rhs: float
    name: str | None = None


class LinearModel:
    """Sparse row-oriented LP/MIP data: bounded variables (optionally
    binary) and rows with <=, =, or >= sense. The objective is always
    maximized."""

    SENSES = ("<=", "=", ">=")

    def __init__(self, name: str = "model"):
        self.name = name
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.obj: list[float] = []
        self.is_binary: list[bool] = []
        self.var_names: list[str | None] = []
        self.rows: list[Row] = []

    # -- construction -------------------------------------------------------
    def add_variable(
        self,
        lb: float = 0.0,
        ub: float = math.inf,
        obj: float = 0.0,
        binary: bool = False,
        name: str | None = None,
    ) -> int:
        if binary:
            lb, ub = 0.0, 1.0
        if math.isnan(lb) or math.isnan(ub) or not math.isfinite(obj):
            raise ModelError(f"non-finite data for variable {name or len(self.lb)}")
        if lb > ub:
            raise ModelError(f"variable {name or len(self.lb)} has lb {lb} > ub {ub}")
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        self.obj.append(float(obj))
        self.is_binary.append(binary)
        self.var_names.append(name)
        return len(self.lb) - 1

    def add_row(self, coeffs, sense: str, rhs: float, name: str | None = None) -> int:
        if sense not in self.SENSES:
            raise ModelError(f"unknown row sense {sense!r}")
        if not math.isfinite(rhs):
            raise ModelError(f"non-finite rhs for row {name or len(self.rows)}")
        merged: dict[int, float] = {}
        for j, v in coeffs:
            j = int(j)
            if not 0 <= j < len(self.lb):
                raise ModelError(f"row {name or len(self.rows)} references unknown variable {j}")
            if not math.isfinite(v):
                raise ModelError(f"non-finite coefficient in row {name or len(self.rows)}")
            merged[j] = merged.get(j, 0.0) + float(v)
        self.rows.append(Row(list(merged.keys()), list(merged.values()), sense, float(rhs), name))
        return len(self.rows) - 1

    # -- inspection ----------------------------------------------------------
    @property
    def n_variables(self) -> int:
        return len(self.lb)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def binary_indices(self) -> list[int]:
        return [j for j, b in enumerate(self.is_binary) if b]

    def copy(self) -> "LinearModel":
        m = LinearModel(self.name)
        m.lb = list(self.lb)
        m.ub = list(self.ub)
        m.obj = list(self.obj)
        m.is_binary = list(self.is_binary)
        m.var_names = list(self.var_names)
        m.rows = [Row(list(r.cols), list(r.vals), r.sense, r.rhs, r.name) for r in self.rows]
        return m

    def objective_value(self, x) -> float:
        return float(np.dot(self.obj, x))


@dataclass
class SolveStats:
    simplex_iterations: int = 0
    nodes: int = 0
    cuts_added: int = 0
    wall_seconds: float = 0.0
    # (bound, incumbent) after each processed node when history tracking is on
    history: list[tuple[float, float]] = field(default_factory=list)


@dataclass
class SolveResult:
    """Outcome of an LP or MIP solve.

    For an optimal LP, ``duals``/``reduced_costs``/``dual_objective`` form a
    duality certificate; for infeasible or unbounded models ``certificate``
    carries the proving row combination or ray. ``bound`` is always a valid
    upper bound on the optimum (equal to the objective when solved exactly).
    """

    status: Status
    objective: float | None = None
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    reduced_costs: np.ndarray | None = None
    dual_objective: float | None = None
    bound: float = math.inf
    certificate: np.ndarray | None = None
    stats: SolveStats = field(default_factory=SolveStats)
