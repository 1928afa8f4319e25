"""Bound rules for the sequential parametrized topological complexity of sphere bundles."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .bundles import BundleSpec, facts, sw_total
from .graded_ring import relative_height


class RuleId(str, enum.Enum):
    L_GENERIC = "L_GENERIC"
    L_FIBER_PARITY = "L_FIBER_PARITY"
    L_EULER_HEIGHT = "L_EULER_HEIGHT"
    L_SW_HEIGHT = "L_SW_HEIGHT"
    U_DIMENSION = "U_DIMENSION"
    U_COMPLEX = "U_COMPLEX"
    U_TWO_SECTIONS = "U_TWO_SECTIONS"
    U_SECAT_STIEFEL = "U_SECAT_STIEFEL"
    U_SHARP = "U_SHARP"


class Direction(str, enum.Enum):
    LOWER = "lower"
    UPPER = "upper"
    EXACT = "exact"


CITATIONS: Dict[RuleId, str] = {
    RuleId.L_GENERIC: "TC_r of the fibre sphere is at least r-1",
    RuleId.L_FIBER_PARITY: "TC_r of an even-dimensional fibre sphere is r",
    RuleId.L_EULER_HEIGHT: "cup-length of ker(diagonal) = h(e(Stiefel)) + r - 1",
    RuleId.L_SW_HEIGHT: "Z/2 cup-length of ker(diagonal) = h(w_{q-1} | w_q) + r - 1",
    RuleId.U_DIMENSION: "dimension/connectivity upper bound, fibre (q-2)-connected",
    RuleId.U_COMPLEX: "complex structure gives a global Stiefel section",
    RuleId.U_TWO_SECTIONS: "two independent sections give Stiefel secat <= 1",
    RuleId.U_SECAT_STIEFEL: "small base: secat(Stiefel) = h(e(Stiefel))",
    RuleId.U_SHARP: "sharp obstruction bound when (q-1) divides dim B",
}


@dataclass(frozen=True)
class Condition:
    name: str
    holds: bool
    detail: str = ""


@dataclass(frozen=True)
class BoundRule:
    id: RuleId
    direction: Direction
    applicable: bool
    value: Optional[int]
    conditions: Tuple[Condition, ...] = ()

    @property
    def citation(self) -> str:
        return CITATIONS[self.id]

    def to_dict(self) -> dict:
        return {
            "id": self.id.value,
            "direction": self.direction.value,
            "value": self.value,
            "applicable": self.applicable,
            "conditions": [
                {"name": c.name, "holds": c.holds, "detail": c.detail} for c in self.conditions
            ],
            "citation": self.citation,
        }


def _rule(rid: RuleId, direction: Direction, value: int, *conds: Condition) -> BoundRule:
    ok = all(c.holds for c in conds)
    return BoundRule(rid, direction, ok, value if ok else None, tuple(conds))


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def rule_lower_generic(spec: BundleSpec, r: int) -> BoundRule:
    return _rule(RuleId.L_GENERIC, Direction.LOWER, r - 1)


def rule_lower_parity(spec: BundleSpec, r: int) -> BoundRule:
    q = spec.rank
    return _rule(RuleId.L_FIBER_PARITY, Direction.LOWER, r, Condition("q odd", q % 2 == 1, f"q={q}"))


def _euler_height_condition(spec: BundleSpec) -> Tuple[Optional[int], Condition]:
    f = facts(spec)
    h = f.euler_height_stiefel
    if h is None:
        return None, Condition("h(e(Stiefel)) available", False, f.reason or "")
    return h, Condition("h(e(Stiefel)) available", True, f"h={h}")


def rule_lower_euler_height(spec: BundleSpec, r: int) -> BoundRule:
    h, cond = _euler_height_condition(spec)
    return _rule(RuleId.L_EULER_HEIGHT, Direction.LOWER, (h or 0) + r - 1, cond)


def sw_relative_height(spec: BundleSpec) -> int:
    w = sw_total(spec)
    q = spec.rank
    return relative_height(w.component(q - 1), w.component(q))


def rule_lower_sw_height(spec: BundleSpec, r: int) -> BoundRule:
    h = sw_relative_height(spec)
    cond = Condition("Z/2 model", True, f"h(w_{spec.rank - 1}|w_{spec.rank})={h}")
    return _rule(RuleId.L_SW_HEIGHT, Direction.LOWER, h + r - 1, cond)


def rule_upper_dimension(spec: BundleSpec, r: int) -> BoundRule:
    q, dim = spec.rank, spec.base.dim
    # fibre S^{q-1} is (q-2)-connected; q = 2 is the k = 0 case
    cond = Condition("fibre (q-2)-connected with q >= 2", q >= 2, f"q={q}")
    return _rule(RuleId.U_DIMENSION, Direction.UPPER, r - 1 + _ceil_div(dim + 1, q - 1), cond)


def rule_upper_complex(spec: BundleSpec, r: int) -> BoundRule:
    f = facts(spec)
    return _rule(RuleId.U_COMPLEX, Direction.EXACT, r - 1, Condition("complex structure", f.complex_structure))


def rule_upper_two_sections(spec: BundleSpec, r: int) -> BoundRule:
    f = facts(spec)
    cond = Condition("two independent sections", f.has_two_sections, f"eps={spec.eps}")
    direction = Direction.EXACT if spec.rank % 2 else Direction.UPPER
    return _rule(RuleId.U_TWO_SECTIONS, direction, r, cond)


def rule_upper_secat(spec: BundleSpec, r: int) -> BoundRule:
    h, cond = _euler_height_condition(spec)
    q, dim = spec.rank, spec.base.dim
    conds = [cond]
    if h is not None:
        conds.append(Condition("dim B <= (q-1) h", dim <= (q - 1) * h, f"{dim} <= {(q - 1) * h}"))
    return _rule(RuleId.U_SECAT_STIEFEL, Direction.EXACT, (h or 0) + r - 1, *conds)


def rule_upper_sharp(spec: BundleSpec, r: int) -> BoundRule:
    q, dim = spec.rank, spec.base.dim
    conds = [
        Condition("q >= 3", q >= 3, f"q={q}"),
        Condition("base simply connected", spec.base.simply_connected, str(spec.base)),
        Condition("(q-1) | dim B", q >= 2 and dim % (q - 1) == 0, f"dim B={dim}"),
    ]
    h, hcond = _euler_height_condition(spec)
    conds.append(hcond)
    quota = dim // (q - 1)
    if h is not None:
        conds.append(Condition("h <= dim B/(q-1)", h <= quota, f"{h} <= {quota}"))
    return _rule(RuleId.U_SHARP, Direction.UPPER, r - 1 + quota, *conds)


RULES: Tuple[Callable[[BundleSpec, int], BoundRule], ...] = (
    rule_lower_generic,
    rule_lower_parity,
    rule_lower_euler_height,
    rule_lower_sw_height,
    rule_upper_dimension,
    rule_upper_complex,
    rule_upper_two_sections,
    rule_upper_secat,
    rule_upper_sharp,
)


class InconsistentBounds(AssertionError):
    """Lower bound exceeds upper bound: a bug in a rule, never a valid outcome."""


@dataclass(frozen=True)
class BoundReport:
    spec: BundleSpec
    r: int
    rules: Tuple[BoundRule, ...]
    lower: int
    upper: Optional[int]
    exact: Optional[int] = field(default=None)

    def rule(self, rid: RuleId) -> BoundRule:
        return next(rule for rule in self.rules if rule.id is rid)

    def to_dict(self) -> dict:
        return {
            "spec": str(self.spec),
            "r": self.r,
            "rank": self.spec.rank,
            "rules": [rule.to_dict() for rule in self.rules],
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
        }


def evaluate(spec: BundleSpec, r: int) -> BoundReport:
    if r < 2:
        raise ValueError("r must be >= 2")
    rules = tuple(rule(spec, r) for rule in RULES)
    lowers: List[int] = [
        x.value for x in rules if x.applicable and x.direction in (Direction.LOWER, Direction.EXACT)
    ]
    uppers: List[int] = [
        x.value for x in rules if x.applicable and x.direction in (Direction.UPPER, Direction.EXACT)
    ]
    lower = max(lowers)
    upper = min(uppers) if uppers else None
    if upper is not None and lower > upper:
        raise InconsistentBounds(f"{spec}, r={r}: lower {lower} > upper {upper}")
    exact = lower if lower == upper else None
    return BoundReport(spec, r, rules, lower, upper, exact)
