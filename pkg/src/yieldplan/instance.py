"""Problem data model: products, facilities, production levels, and the
level-combination -> distribution map that makes supply uncertainty
decision dependent.

Instances are immutable after construction and safe to share across
workers. Validation never raises on bad data; it reports violations so
that deliberately broken fixtures can be inspected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

PROBABILITY_TOL = 1e-9

INSTANCE_FORMAT_VERSION = 1


class UnknownIdError(KeyError):
    """A product, facility, or distribution reference does not exist."""


class LevelMapError(LookupError):
    """A complete level assignment has no matching distribution."""


class InstanceValidationError(ValueError):
    """An operation that requires a valid instance received an invalid one."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        head = "; ".join(v.message for v in report.violations[:3])
        more = "" if len(report.violations) <= 3 else f" (+{len(report.violations) - 3} more)"
        super().__init__(f"invalid instance: {head}{more}")


@dataclass(frozen=True)
class ProductionLevel:
    """Closed interval [lower, upper] bounding the order volume of one
    (product, facility) pair when this level is chosen."""

    lower: float
    upper: float


@dataclass(frozen=True)
class ScenarioRealization:
    """One realization of a joint distribution: per-facility yield fractions
    and the product demand, with its probability."""

    probability: float
    yields: tuple[float, ...]  # by facility position
    demand: float


@dataclass(frozen=True)
class JointDistribution:
    """A joint yield+demand distribution of one product, together with the
    production level per facility that enforces it."""

    id: int
    enforced_level: tuple[int, ...]  # level index by facility position
    scenarios: tuple[ScenarioRealization, ...]


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    where: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:  # truthy when valid
        return self.ok

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


@dataclass(frozen=True)
class ProductionInstance:
    """Full problem data.

    All per-product and per-facility data is positional in the order of
    ``products`` / ``facilities``. ``levels[p][f]`` lists the production
    levels available for product p at facility f; ``distributions[p]``
    lists the joint distributions of product p, each carrying the level
    assignment (one level index per facility) that enforces it.
    """

    products: tuple[str, ...]
    facilities: tuple[str, ...]
    levels: tuple[tuple[tuple[ProductionLevel, ...], ...], ...]
    capacity: tuple[float, ...]
    unit_cost: tuple[tuple[float, ...], ...]
    full_price: tuple[float, ...]
    salvage_price: tuple[float, ...]
    distributions: tuple[tuple[JointDistribution, ...], ...]
    meta: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        # Lookup tables derived once; duplicates keep the first distribution
        # so that validation (not construction) reports non-injective maps.
        object.__setattr__(self, "_product_pos", {p: i for i, p in enumerate(self.products)})
        object.__setattr__(self, "_facility_pos", {f: i for i, f in enumerate(self.facilities)})
        assignment_maps = []
        for dists in self.distributions:
            table: dict[tuple[int, ...], int] = {}
            for d, dist in enumerate(dists):
                table.setdefault(tuple(dist.enforced_level), d)
            assignment_maps.append(table)
        object.__setattr__(self, "_assignment_maps", tuple(assignment_maps))

    # -- positional helpers -------------------------------------------------
    @property
    def n_products(self) -> int:
        return len(self.products)

    @property
    def n_facilities(self) -> int:
        return len(self.facilities)

    def product_index(self, product: str) -> int:
        try:
            return self._product_pos[product]
        except KeyError:
            raise UnknownIdError(f"unknown product {product!r}") from None

    def facility_index(self, facility: str) -> int:
        try:
            return self._facility_pos[facility]
        except KeyError:
            raise UnknownIdError(f"unknown facility {facility!r}") from None

    def distribution_for_assignment(self, p: int, assignment: Sequence[int]) -> int:
        """Positional form of the level-map lookup: distribution index for a
        complete per-facility level assignment of product index ``p``."""
        table = self._assignment_maps[p]
        key = tuple(int(l) for l in assignment)
        try:
            return table[key]
        except KeyError:
            raise LevelMapError(
                f"no distribution of product {self.products[p]!r} is enforced by "
                f"level assignment {key}"
            ) from None


# ---------------------------------------------------------------------------
# Level map operations
# ---------------------------------------------------------------------------

def enforced_levels(inst: ProductionInstance, product: str, d: int) -> dict[str, int]:
    """Per-facility production level enforcing distribution ``d`` of ``product``."""
    p = inst.product_index(product)
    dists = inst.distributions[p]
    if not 0 <= d < len(dists):
        raise UnknownIdError(f"product {product!r} has no distribution {d}")
    return dict(zip(inst.facilities, dists[d].enforced_level))


def infer_distribution(inst: ProductionInstance, product: str, assignment: Mapping[str, int]) -> int:
    """Distribution index enforced by a complete facility -> level assignment.

    Raises LevelMapError when no distribution matches (the level map is not
    total, which validation flags as a broken instance)."""
    p = inst.product_index(product)
    positional = [0] * inst.n_facilities
    seen = set()
    for fac, lvl in assignment.items():
        positional[inst.facility_index(fac)] = int(lvl)
        seen.add(fac)
    if len(seen) != inst.n_facilities:
        missing = set(inst.facilities) - seen
        raise UnknownIdError(f"assignment misses facilities {sorted(missing)}")
    return inst.distribution_for_assignment(p, positional)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _check_shapes(inst: ProductionInstance, out: list[Violation]) -> bool:
    """Structural arity checks; remaining checks are skipped when these fail."""
    ok = True
    P, F = inst.n_products, inst.n_facilities

    def bad(msg, **where):
        nonlocal ok
        out.append(Violation("shape", msg, where))
        ok = False

    if len(inst.levels) != P:
        bad(f"levels has {len(inst.levels)} product entries, expected {P}")
    if len(inst.capacity) != F:
        bad(f"capacity has {len(inst.capacity)} entries, expected {F}")
    if len(inst.unit_cost) != P or any(len(row) != F for row in inst.unit_cost):
        bad("unit_cost is not a products x facilities matrix")
    if len(inst.full_price) != P or len(inst.salvage_price) != P:
        bad("price/salvage arrays do not match the product count")
    if len(inst.distributions) != P:
        bad(f"distributions has {len(inst.distributions)} product entries, expected {P}")
    if not ok:
        return False
    for p, per_fac in enumerate(inst.levels):
        if len(per_fac) != F:
            bad(f"levels[{inst.products[p]}] has {len(per_fac)} facility entries", p=inst.products[p])
    for p, dists in enumerate(inst.distributions):
        for d, dist in enumerate(dists):
            if len(dist.enforced_level) != F:
                bad(
                    f"distribution {d} of {inst.products[p]} maps {len(dist.enforced_level)} facilities",
                    p=inst.products[p], d=d,
                )
            for s, sc in enumerate(dist.scenarios):
                if len(sc.yields) != F:
                    bad(
                        f"scenario {s} of ({inst.products[p]}, d{d}) has {len(sc.yields)} yields",
                        p=inst.products[p], d=d, s=s,
                    )
    return ok


def validate_instance(inst: ProductionInstance) -> ValidationReport:
    """Check every structural invariant; an empty report means the instance
    is valid. Violations are data, not exceptions."""
    out: list[Violation] = []
    if not _check_shapes(inst, out):
        return ValidationReport(tuple(out))

    for f, b in enumerate(inst.capacity):
        if b < 0:
            out.append(Violation(
                "capacity_negative", f"capacity {b} < 0 at ({inst.facilities[f]})",
                {"f": inst.facilities[f]},
            ))

    for p, product in enumerate(inst.products):
        price, salvage = inst.full_price[p], inst.salvage_price[p]
        if price <= salvage:
            out.append(Violation(
                "price_vs_salvage", f"price {price} <= salvage {salvage} at ({product})",
                {"p": product},
            ))
        for f, facility in enumerate(inst.facilities):
            cost = inst.unit_cost[p][f]
            if cost <= 0:
                out.append(Violation(
                    "cost_nonpositive", f"cost {cost} <= 0 at ({product}, {facility})",
                    {"p": product, "f": facility},
                ))
            if salvage >= cost:
                out.append(Violation(
                    "salvage_vs_cost", f"salvage {salvage} >= cost {cost} at ({product}, {facility})",
                    {"p": product, "f": facility},
                ))

    # Production levels: sane bounds, pairwise-disjoint interiors (shared
    # endpoints allowed), and a level whose interval contains zero.
    for p, product in enumerate(inst.products):
        for f, facility in enumerate(inst.facilities):
            lv = inst.levels[p][f]
            if not lv:
                out.append(Violation(
                    "no_levels", f"no production levels at ({product}, {facility})",
                    {"p": product, "f": facility},
                ))
                continue
            for l, level in enumerate(lv):
                if level.lower < 0 or level.upper < level.lower:
                    out.append(Violation(
                        "level_bounds",
                        f"level {l} at ({product}, {facility}) has bounds "
                        f"[{level.lower}, {level.upper}]",
                        {"p": product, "f": facility, "l": l},
                    ))
            for i in range(len(lv)):
                for j in range(i + 1, len(lv)):
                    lo = max(lv[i].lower, lv[j].lower)
                    hi = min(lv[i].upper, lv[j].upper)
                    if lo < hi:  # overlapping interiors
                        out.append(Violation(
                            "level_overlap",
                            f"levels {i} and {j} at ({product}, {facility}) overlap on "
                            f"({lo}, {hi})",
                            {"p": product, "f": facility, "l": (i, j)},
                        ))
            if not any(level.lower <= 0.0 <= level.upper for level in lv):
                out.append(Violation(
                    "no_zero_level",
                    f"no level at ({product}, {facility}) allows producing nothing",
                    {"p": product, "f": facility},
                ))

    # Distributions: probabilities, realization ranges, level references, and
    # a bijection between complete level assignments and the distribution set.
    for p, product in enumerate(inst.products):
        dists = inst.distributions[p]
        n_assignments = 1
        for f in range(inst.n_facilities):
            n_assignments *= max(len(inst.levels[p][f]), 1)
        if not dists:
            out.append(Violation(
                "no_distributions", f"product {product} has no distributions", {"p": product},
            ))
            continue
        seen_assignments: dict[tuple[int, ...], int] = {}
        for d, dist in enumerate(dists):
            total = sum(sc.probability for sc in dist.scenarios)
            if abs(total - 1.0) > PROBABILITY_TOL:
                out.append(Violation(
                    "probability_sum",
                    f"probabilities sum to {total} at ({product}, d{d})",
                    {"p": product, "d": d},
                ))
            for s, sc in enumerate(dist.scenarios):
                if not 0.0 < sc.probability <= 1.0:
                    out.append(Violation(
                        "probability_range",
                        f"probability {sc.probability} outside (0, 1] at ({product}, d{d}, s{s})",
                        {"p": product, "d": d, "s": s},
                    ))
                for f, y in enumerate(sc.yields):
                    if not 0.0 <= y <= 1.0:
                        out.append(Violation(
                            "yield_range",
                            f"yield {y} outside [0, 1] at ({product}, {inst.facilities[f]}, d{d}, s{s})",
                            {"p": product, "f": inst.facilities[f], "d": d, "s": s},
                        ))
                if sc.demand < 0:
                    out.append(Violation(
                        "demand_negative",
                        f"demand {sc.demand} < 0 at ({product}, d{d}, s{s})",
                        {"p": product, "d": d, "s": s},
                    ))
            bad_ref = False
            for f, l in enumerate(dist.enforced_level):
                if not 0 <= l < len(inst.levels[p][f]):
                    out.append(Violation(
                        "bad_level_index",
                        f"distribution d{d} of {product} references level {l} "
                        f"at ({inst.facilities[f]})",
                        {"p": product, "f": inst.facilities[f], "d": d, "l": l},
                    ))
                    bad_ref = True
            if not bad_ref:
                key = tuple(dist.enforced_level)
                if key in seen_assignments:
                    out.append(Violation(
                        "level_map_not_injective",
                        f"distributions d{seen_assignments[key]} and d{d} of {product} "
                        f"share level assignment {key}",
                        {"p": product, "d": (seen_assignments[key], d)},
                    ))
                else:
                    seen_assignments[key] = d
        if len(seen_assignments) < n_assignments:
            out.append(Violation(
                "level_map_not_total",
                f"product {product} covers {len(seen_assignments)} of "
                f"{n_assignments} level assignments",
                {"p": product},
            ))

    return ValidationReport(tuple(out))


def require_valid(inst: ProductionInstance) -> None:
    report = validate_instance(inst)
    if not report.ok:
        raise InstanceValidationError(report)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def instance_to_json(inst: ProductionInstance) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "format_version": INSTANCE_FORMAT_VERSION,
        "products": list(inst.products),
        "facilities": list(inst.facilities),
        "capacity": list(inst.capacity),
        "cost": [list(row) for row in inst.unit_cost],
        "price": list(inst.full_price),
        "salvage": list(inst.salvage_price),
        "levels": [
            [[{"lo": lv.lower, "hi": lv.upper} for lv in per_fac] for per_fac in per_prod]
            for per_prod in inst.levels
        ],
        "distributions": [
            [
                {
                    "levels": list(dist.enforced_level),
                    "scenarios": [
                        {"pi": sc.probability, "yields": list(sc.yields), "demand": sc.demand}
                        for sc in dist.scenarios
                    ],
                }
                for dist in dists
            ]
            for dists in inst.distributions
        ],
    }
    if inst.meta is not None:
        doc["meta"] = inst.meta
    return doc


def instance_from_json(doc: Mapping[str, Any]) -> ProductionInstance:
    try:
        return ProductionInstance(
            products=tuple(str(p) for p in doc["products"]),
            facilities=tuple(str(f) for f in doc["facilities"]),
            levels=tuple(
                tuple(
                    tuple(ProductionLevel(float(lv["lo"]), float(lv["hi"])) for lv in per_fac)
                    for per_fac in per_prod
                )
                for per_prod in doc["levels"]
            ),
            capacity=tuple(float(b) for b in doc["capacity"]),
            unit_cost=tuple(tuple(float(c) for c in row) for row in doc["cost"]),
            full_price=tuple(float(v) for v in doc["price"]),
            salvage_price=tuple(float(v) for v in doc["salvage"]),
            distributions=tuple(
                tuple(
                    JointDistribution(
                        id=d,
                        enforced_level=tuple(int(l) for l in dist["levels"]),
                        scenarios=tuple(
                            ScenarioRealization(
                                probability=float(sc["pi"]),
                                yields=tuple(float(y) for y in sc["yields"]),
                                demand=float(sc["demand"]),
                            )
                            for sc in dist["scenarios"]
                        ),
                    )
                    for d, dist in enumerate(dists)
                )
                for dists in doc["distributions"]
            ),
            meta=dict(doc["meta"]) if "meta" in doc else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed instance document: {exc}") from exc


def write_instance(inst: ProductionInstance, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(instance_to_json(inst), indent=1), encoding="utf-8")
    return path


def read_instance(path: str | Path) -> ProductionInstance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_json(json.load(fh))
