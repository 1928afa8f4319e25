"""Supported base spaces and their standard cohomology presentations."""

from __future__ import annotations

import enum
from functools import lru_cache
from dataclasses import dataclass

from .graded_ring import CoefficientRing, Generator, RingError, RingModel, Rule


class BaseKind(enum.Enum):
    POINT = "pt"
    SPHERE = "S"
    COMPLEX_PROJECTIVE = "CP"
    REAL_PROJECTIVE = "RP"


@dataclass(frozen=True)
class BaseSpace:
    kind: BaseKind
    n: int = 0

    def __post_init__(self) -> None:
        if self.kind is BaseKind.POINT:
            if self.n != 0:
                raise ValueError("a point has no parameter")
        elif self.n < 1:
            raise ValueError(f"{self.kind.value}({self.n}): parameter must be >= 1")

    @classmethod
    def point(cls) -> "BaseSpace":
        return cls(BaseKind.POINT)

    @classmethod
    def sphere(cls, m: int) -> "BaseSpace":
        return cls(BaseKind.SPHERE, m)

    @classmethod
    def cp(cls, n: int) -> "BaseSpace":
        return cls(BaseKind.COMPLEX_PROJECTIVE, n)

    @classmethod
    def rp(cls, n: int) -> "BaseSpace":
        return cls(BaseKind.REAL_PROJECTIVE, n)

    @property
    def dim(self) -> int:
        if self.kind is BaseKind.COMPLEX_PROJECTIVE:
            return 2 * self.n
        return self.n

    @property
    def simply_connected(self) -> bool:
        if self.kind is BaseKind.REAL_PROJECTIVE:
            return False
        if self.kind is BaseKind.SPHERE:
            return self.n >= 2
        return True

    def __str__(self) -> str:
        if self.kind is BaseKind.POINT:
            return "pt"
        return f"{self.kind.value}({self.n})"


GENERATOR_NAME = {
    BaseKind.SPHERE: "s",
    BaseKind.COMPLEX_PROJECTIVE: "x",
    BaseKind.REAL_PROJECTIVE: "a",
}


def make_base_ring(base: BaseSpace, coefficients: CoefficientRing = CoefficientRing.INTEGERS) -> RingModel:
    """Standard truncated presentation of ``H*(base)`` with ``top_degree = dim base``.

    ``CP(n)``: one generator ``x`` of degree 2 with ``x^(n+1) = 0``;
    ``RP(n)``: one generator ``a`` of degree 1 with ``a^(n+1) = 0`` (Z/2 only);
    ``S(m)``: one generator ``s`` of degree m squaring to zero; a point: no generators.
    Cached, so equal arguments give the same ring object.
    """
    return _base_ring(base, coefficients)


@lru_cache(maxsize=None)
def _base_ring(base: BaseSpace, coefficients: CoefficientRing) -> RingModel:
    if base.kind is BaseKind.POINT:
        return RingModel((), coefficients, 0)
    if base.kind is BaseKind.REAL_PROJECTIVE and coefficients is CoefficientRing.INTEGERS:
        raise RingError("RP(n) is only modelled with Z/2 coefficients")
    name = GENERATOR_NAME[base.kind]
    if base.kind is BaseKind.SPHERE:
        degree, power = base.n, 2
    elif base.kind is BaseKind.COMPLEX_PROJECTIVE:
        degree, power = 2, base.n + 1
    else:
        degree, power = 1, base.n + 1
    return RingModel((Generator(name, degree),), coefficients, base.dim, (Rule(0, power, ()),))
