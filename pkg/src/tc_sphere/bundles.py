"""Vector bundles built from canonical line bundles and trivial summands.

A spec is ``k*eta + l*eps`` over a supported base, where ``eta`` is the
canonical complex line (real rank 2) over ``CP(n)`` or the canonical real
line over ``RP(n)``, and ``eps`` is the trivial real line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .graded_ring import CoefficientRing, GradedClass, height
from .spaces import BaseKind, BaseSpace, GENERATOR_NAME, make_base_ring


class BundleError(ValueError):
    pass


class SpecParseError(BundleError):
    pass


class NotEtaEpsForm(BundleError):
    """The bundle has no trivial summand to split off."""


class NonOrientableComplement(BundleError):
    pass


class IntegralModelUnavailable(BundleError):
    """The base is only modelled with Z/2 coefficients."""


GRAMMAR = "base=CP(n)|RP(n)|S(m)|pt; bundle=<k>*eta + <l>*eps"


@dataclass(frozen=True)
class BundleSpec:
    base: BaseSpace
    eta: int = 0
    eps: int = 0

    def __post_init__(self) -> None:
        if self.eta < 0 or self.eps < 0:
            raise BundleError("summand counts must be non-negative")
        if self.eta and self.base.kind not in (BaseKind.COMPLEX_PROJECTIVE, BaseKind.REAL_PROJECTIVE):
            raise BundleError(f"no canonical line bundle over {self.base}")
        if self.rank < 2:
            raise BundleError(f"rank must be >= 2, got {self.rank}")

    @property
    def rank(self) -> int:
        eta_rank = 2 if self.base.kind is BaseKind.COMPLEX_PROJECTIVE else 1
        return eta_rank * self.eta + self.eps

    q = rank

    def __str__(self) -> str:
        terms = []
        if self.eta:
            terms.append(f"{self.eta}*eta")
        if self.eps:
            terms.append(f"{self.eps}*eps")
        return f"{self.base}; {'+'.join(terms)}"


_BASE_RE = re.compile(r"^\s*(?:base\s*=\s*)?(?:(CP|RP|S)\s*\(\s*(\d+)\s*\)|(pt|point))\s*$", re.I)
_TERM_RE = re.compile(r"^\s*(?:(\d+)\s*\*\s*)?(eta|eps)\s*$", re.I)


def parse_spec(text: str) -> BundleSpec:
    """Parse ``"CP(3); 1*eta+1*eps"`` style descriptions."""
    head, sep, tail = text.partition(";")
    if not sep:
        raise SpecParseError(f"missing ';' in {text!r}; expected {GRAMMAR}")
    m = _BASE_RE.match(head)
    if not m:
        raise SpecParseError(f"bad base {head.strip()!r}; expected {GRAMMAR}")
    if m.group(3):
        base = BaseSpace.point()
    else:
        kind = {"CP": BaseKind.COMPLEX_PROJECTIVE, "RP": BaseKind.REAL_PROJECTIVE, "S": BaseKind.SPHERE}
        try:
            base = BaseSpace(kind[m.group(1).upper()], int(m.group(2)))
        except ValueError as exc:
            raise SpecParseError(str(exc)) from None
    tail = re.sub(r"^\s*bundle\s*=", "", tail, flags=re.I)
    counts = {"eta": 0, "eps": 0}
    for term in tail.split("+"):
        t = _TERM_RE.match(term)
        if not t:
            raise SpecParseError(f"bad summand {term.strip()!r}; expected {GRAMMAR}")
        counts[t.group(2).lower()] += int(t.group(1) or 1)
    try:
        return BundleSpec(base, counts["eta"], counts["eps"])
    except BundleError as exc:
        raise SpecParseError(str(exc)) from None


def is_orientable(spec: BundleSpec) -> bool:
    # w_1 = eta * a over RP(n)
    return spec.base.kind is not BaseKind.REAL_PROJECTIVE or spec.eta % 2 == 0


def has_complex_structure(spec: BundleSpec) -> bool:
    """Syntactic test: summands group into complex lines.

    Canonical complex lines are complex; two real canonical lines form
    ``eta (x) C``; trivial lines pair up into trivial complex lines.
    """
    if spec.eps % 2:
        return False
    if spec.base.kind is BaseKind.REAL_PROJECTIVE:
        return spec.eta % 2 == 0
    return True


def sw_total(spec: BundleSpec) -> GradedClass:
    """Total Stiefel-Whitney class in ``H*(base; Z/2)`` by the Cartan formula."""
    ring = make_base_ring(spec.base, CoefficientRing.MOD_TWO)
    if not spec.eta:
        return ring.one()
    # mod-2 reduction of c(eta) = 1 + x over CP(n); w(eta) = 1 + a over RP(n)
    line = ring.one() + ring.gen(GENERATOR_NAME[spec.base.kind])
    return line**spec.eta


def sw_class(spec: BundleSpec, i: int) -> GradedClass:
    return sw_total(spec).component(i)


def euler_class_eta(spec: BundleSpec) -> GradedClass:
    """Integral Euler class of the complement ``eta'`` in ``spec = eta' + eps``.

    The sign convention is ``e(canonical complex line) = +x``.
    """
    if spec.eps == 0:
        raise NotEtaEpsForm(f"{spec} has no trivial summand")
    if spec.base.kind is BaseKind.REAL_PROJECTIVE:
        if spec.eta % 2:
            raise NonOrientableComplement(f"complement of eps in {spec} is not orientable")
        raise IntegralModelUnavailable(f"{spec.base} is only modelled over Z/2")
    ring = make_base_ring(spec.base, CoefficientRing.INTEGERS)
    if spec.eps >= 2 or spec.eta == 0:
        # complement still has a nowhere-zero section
        return ring.zero()
    # e(k*eta) = c_k((1 + x)^k) = x^k
    return ring.gen("x") ** spec.eta


def euler_height_stiefel(spec: BundleSpec) -> int:
    """Height of the Euler class of the Stiefel bundle over the sphere bundle.

    Equals ``h(e(eta'))`` for even rank and ``2*floor(h/2) + 1`` for odd rank.
    """
    h = height(euler_class_eta(spec))
    if spec.rank % 2 == 0:
        return h
    return 2 * (h // 2) + 1


@dataclass(frozen=True)
class BundleFacts:
    orientable: bool
    has_section: bool
    has_two_sections: bool
    complex_structure: bool
    euler_class_eta: Optional[GradedClass]
    sw_total: GradedClass
    euler_height_stiefel: Optional[int]
    reason: Optional[str] = None


@lru_cache(maxsize=1024)
def facts(spec: BundleSpec) -> BundleFacts:
    try:
        e = euler_class_eta(spec)
        h: Optional[int] = euler_height_stiefel(spec)
        reason = None
    except BundleError as exc:
        e, h, reason = None, None, str(exc)
    return BundleFacts(
        orientable=is_orientable(spec),
        has_section=spec.eps >= 1,
        has_two_sections=spec.eps >= 2,
        complex_structure=has_complex_structure(spec),
        euler_class_eta=e,
        sw_total=sw_total(spec),
        euler_height_stiefel=h,
        reason=reason,
    )
