"""Truncated graded-commutative rings over Z and Z/2.

A ring is presented by generators with positive degrees and rewrite rules of
the form ``g**k -> R`` where ``R`` only involves generators up to ``g`` and has
``g``-exponent below ``k``.  Elements are kept as sparse maps from exponent
vectors (in fixed generator order) to coefficients, always fully rewritten.
Everything above ``top_degree`` is zero.
"""

from __future__ import annotations

import enum
import itertools
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import gf2

Monomial = Tuple[int, ...]
Terms = Dict[Monomial, int]


class RingError(ValueError):
    """Raised on malformed presentations or operations outside the supported scope."""


class CoefficientRing(enum.Enum):
    INTEGERS = "Z"
    MOD_TWO = "Z2"

    def reduce(self, c: int) -> int:
        return c % 2 if self is CoefficientRing.MOD_TWO else c

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int


@dataclass(frozen=True)
class Rule:
    """``generator ** power`` rewrites to ``replacement`` (a normal-form sum)."""

    generator: int
    power: int
    replacement: Tuple[Tuple[Monomial, int], ...]


class RingModel:
    """Finitely presented truncated graded ring.

    Immutable after construction.  A private product memo is filled lazily;
    it never changes the value of any operation.
    """

    def __init__(
        self,
        generators: Sequence[Generator],
        coefficients: CoefficientRing,
        top_degree: int,
        rules: Iterable[Rule] = (),
    ) -> None:
        self.generators: Tuple[Generator, ...] = tuple(generators)
        self.coefficients = coefficients
        self.top_degree = int(top_degree)
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise RingError(f"duplicate generator names: {names}")
        if any(g.degree < 1 for g in self.generators):
            raise RingError("generator degrees must be >= 1")
        if self.top_degree < 0:
            raise RingError("top_degree must be >= 0")
        self._degrees = tuple(g.degree for g in self.generators)
        self._index = {name: i for i, name in enumerate(names)}

        table: Dict[int, Rule] = {}
        for rule in rules:
            if rule.generator in table:
                raise RingError(f"two rules for generator {names[rule.generator]}")
            table[rule.generator] = rule
        odd_free = coefficients is CoefficientRing.INTEGERS
        for i, g in enumerate(self.generators):
            if odd_free and g.degree % 2:
                # torsion-free + graded commutative forces g^2 = 0
                rule = table.get(i)
                if rule is None:
                    table[i] = Rule(i, 2, ())
                elif rule.power != 2 or rule.replacement:
                    raise RingError(f"odd generator {g.name} over Z must satisfy {g.name}^2 = 0")
        self._rules = table
        for rule in table.values():
            self._check_rule(rule)
        self._memo: Dict[Tuple[Monomial, Monomial], Terms] = {}

    # -- presentation helpers -------------------------------------------------

    def _check_rule(self, rule: Rule) -> None:
        g = rule.generator
        name = self.generators[g].name
        if rule.power < 2:
            raise RingError(f"rule for {name} must have power >= 2")
        lhs_degree = rule.power * self._degrees[g]
        for mono, _ in rule.replacement:
            if len(mono) != len(self.generators):
                raise RingError(f"rule for {name}: monomial {mono} has wrong length")
            if self.monomial_degree(mono) != lhs_degree:
                raise RingError(f"rule for {name} is not homogeneous")
            if any(mono[h] for h in range(g + 1, len(mono))):
                raise RingError(f"rule for {name} uses a later generator")
            if mono[g] >= rule.power:
                raise RingError(f"rule for {name} does not lower the exponent")
            for h, e in enumerate(mono):
                other = self._rules.get(h)
                if other is not None and e >= other.power:
                    raise RingError(f"rule for {name} is not in normal form")

    def extend(self, generators: Sequence[Generator], top_degree: int) -> "RingModel":
        """Same rules, more generators appended at the end (no rules for them yet)."""
        return RingModel(
            self.generators + tuple(generators),
            self.coefficients,
            top_degree,
            self._padded_rules(len(generators)),
        )

    def with_rules(self, rules: Mapping[str, Tuple[int, "GradedClass"]]) -> "RingModel":
        """Add ``name -> (power, replacement)`` rules; replacements live in ``self``."""
        new = dict(self._rules)
        for name, (power, rhs) in rules.items():
            if rhs.ring is not self:
                raise RingError("rule replacement must belong to the ring being extended")
            i = self.index(name)
            new[i] = Rule(i, power, tuple(sorted(rhs.terms.items())))
        return RingModel(self.generators, self.coefficients, self.top_degree, new.values())

    def _padded_rules(self, extra: int) -> Iterator[Rule]:
        pad = (0,) * extra
        for rule in self._rules.values():
            yield Rule(rule.generator, rule.power, tuple((m + pad, c) for m, c in rule.replacement))

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise RingError(f"unknown generator {name!r}") from None

    def monomial_degree(self, mono: Monomial) -> int:
        return sum(e * d for e, d in zip(mono, self._degrees))

    @property
    def rules(self) -> Tuple[Rule, ...]:
        return tuple(self._rules[i] for i in sorted(self._rules))

    # -- elements -------------------------------------------------------------

    def zero(self) -> "GradedClass":
        return GradedClass(self, {})

    def one(self) -> "GradedClass":
        return self.scalar(1)

    def scalar(self, c: int) -> "GradedClass":
        return GradedClass.from_terms(self, {(0,) * len(self.generators): c})

    def gen(self, name: str) -> "GradedClass":
        i = self.index(name)
        mono = tuple(int(j == i) for j in range(len(self.generators)))
        return self.monomial(mono)

    def monomial(self, mono: Monomial, coefficient: int = 1) -> "GradedClass":
        """The class of a monomial, rewritten into normal form."""
        return GradedClass.from_terms(self, {tuple(mono): coefficient})

    def embed(self, c: "GradedClass") -> "GradedClass":
        """Image of a class from a ring whose generators are a prefix of ours."""
        src = c.ring
        n = len(src.generators)
        if src.generators != self.generators[:n] or src.coefficients is not self.coefficients:
            raise RingError("source ring is not a sub-presentation")
        pad = (0,) * (len(self.generators) - n)
        return GradedClass.from_terms(self, {m + pad: v for m, v in c.terms.items()})

    # -- basis ----------------------------------------------------------------

    def _max_exponent(self, i: int) -> int:
        cap = self.top_degree // self._degrees[i]
        rule = self._rules.get(i)
        return cap if rule is None else min(cap, rule.power - 1)

    @cached_property
    def _basis_by_degree(self) -> Dict[int, Tuple[Monomial, ...]]:
        ranges = [range(self._max_exponent(i) + 1) for i in range(len(self.generators))]
        by_degree: Dict[int, list] = defaultdict(list)
        for mono in itertools.product(*ranges):
            d = self.monomial_degree(mono)
            if d <= self.top_degree:
                by_degree[d].append(mono)
        return {d: tuple(sorted(ms, reverse=True)) for d, ms in by_degree.items()}

    def basis(self, degree: int) -> Tuple[Monomial, ...]:
        return self._basis_by_degree.get(degree, ())

    def poincare_series(self) -> Tuple[int, ...]:
        """Coefficients ``(c_0, ..., c_top)`` of the Poincare polynomial."""
        return trim_series(tuple(len(self.basis(d)) for d in range(self.top_degree + 1)))

    # -- multiplication kernel ------------------------------------------------

    def _times_generator(self, terms: Terms, g: int) -> Terms:
        """Right-multiply a normal-form sum by generator ``g``."""
        n = len(self.generators)
        deg_g = self._degrees[g]
        signed = deg_g % 2 == 1 and self.coefficients is CoefficientRing.INTEGERS
        rule = self._rules.get(g)
        out: Terms = defaultdict(int)
        for mono, c in terms.items():
            if self.monomial_degree(mono) + deg_g > self.top_degree:
                continue
            if signed and sum(mono[h] * self._degrees[h] for h in range(g + 1, n)) % 2:
                c = -c
            new = list(mono)
            new[g] += 1
            if rule is None or new[g] < rule.power:
                out[tuple(new)] += c
                continue
            # new[g] == rule.power: L * g^power * H  ->  L * R * H
            low = tuple(new[:g]) + (0,) * (n - g)
            part = self._mul_terms({low: 1}, dict(rule.replacement))
            for h in range(g + 1, n):
                for _ in range(new[h]):
                    part = self._times_generator(part, h)
            for m, v in part.items():
                out[m] += c * v
        return self._clean(out)

    def _mono_product(self, a: Monomial, b: Monomial) -> Terms:
        key = (a, b)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        terms: Terms = {a: 1}
        for h, e in enumerate(b):
            for _ in range(e):
                terms = self._times_generator(terms, h)
                if not terms:
                    break
        self._memo[key] = terms
        return terms

    def _mul_terms(self, a: Mapping[Monomial, int], b: Mapping[Monomial, int]) -> Terms:
        out: Terms = defaultdict(int)
        for ma, ca in a.items():
            for mb, cb in b.items():
                for m, v in self._mono_product(ma, mb).items():
                    out[m] += ca * cb * v
        return self._clean(out)

    def _clean(self, terms: Mapping[Monomial, int]) -> Terms:
        red = self.coefficients.reduce
        return {m: red(c) for m, c in terms.items() if red(c)}

    def __repr__(self) -> str:
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"RingModel({self.coefficients}[{gens}], top={self.top_degree})"


class GradedClass:
    """Immutable element of a :class:`RingModel` in normal form."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingModel, terms: Terms) -> None:
        self.ring = ring
        self.terms: Terms = terms

    @classmethod
    def from_terms(cls, ring: RingModel, terms: Mapping[Monomial, int]) -> "GradedClass":
        """Build from arbitrary (not necessarily rewritten) monomials."""
        result: Terms = defaultdict(int)
        for mono, c in terms.items():
            if len(mono) != len(ring.generators):
                raise RingError(f"monomial {mono} has wrong length")
            for m, v in _rewrite(ring, mono).items():
                result[m] += c * v
        return cls(ring, ring._clean(result))

    # arithmetic -----------------------------------------------------------------

    def _coerce(self, other: Union["GradedClass", int]) -> "GradedClass":
        if isinstance(other, GradedClass):
            if other.ring is not self.ring:
                raise RingError("operands live in different rings")
            return other
        if isinstance(other, (int, np.integer)):
            return self.ring.scalar(int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = defaultdict(int, self.terms)
        for m, c in other.terms.items():
            out[m] += c
        return GradedClass(self.ring, self.ring._clean(out))

    __radd__ = __add__

    def __neg__(self) -> "GradedClass":
        return GradedClass(self.ring, self.ring._clean({m: -c for m, c in self.terms.items()}))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return GradedClass(self.ring, self.ring._clean({m: c * int(other) for m, c in self.terms.items()}))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return GradedClass(self.ring, self.ring._mul_terms(self.terms, other.terms))

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int) -> "GradedClass":
        if k < 0:
            raise RingError("negative powers are not defined")
        result = self.ring.one()
        for _ in range(k):
            result = result * self
            if result.is_zero():
                break
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, np.integer)):
            other = self.ring.scalar(int(other))
        if not isinstance(other, GradedClass):
            return NotImplemented
        return self.ring is other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((id(self.ring), frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # grading ----------------------------------------------------------------

    def degrees(self) -> Tuple[int, ...]:
        return tuple(sorted({self.ring.monomial_degree(m) for m in self.terms}))

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    @property
    def degree(self) -> Optional[int]:
        """Degree of a homogeneous class; ``None`` for zero."""
        degs = self.degrees()
        if len(degs) > 1:
            raise RingError(f"class is not homogeneous (degrees {degs})")
        return degs[0] if degs else None

    def component(self, degree: int) -> "GradedClass":
        return GradedClass(
            self.ring,
            {m: c for m, c in self.terms.items() if self.ring.monomial_degree(m) == degree},
        )

    def vector(self, degree: int) -> Tuple[int, ...]:
        """Coefficients of the degree-``degree`` part on ``ring.basis(degree)``."""
        return tuple(self.terms.get(m, 0) for m in self.ring.basis(degree))

    def components(self) -> Dict[int, Tuple[int, ...]]:
        return {d: self.vector(d) for d in self.degrees()}

    def coefficient(self, mono: Monomial) -> int:
        return self.terms.get(mono, 0)

    def __repr__(self) -> str:
        return format_class(self)


def _rewrite(ring: RingModel, mono: Monomial) -> Terms:
    terms: Terms = {(0,) * len(mono): 1}
    for h, e in enumerate(mono):
        for _ in range(e):
            terms = ring._times_generator(terms, h)
            if not terms:
                return {}
    return terms


def format_class(c: GradedClass) -> str:
    if c.is_zero():
        return "0"
    names = [g.name for g in c.ring.generators]
    parts = []
    for mono in sorted(c.terms, key=lambda m: (c.ring.monomial_degree(m), m)):
        coef = c.terms[mono]
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, mono) if e]
        body = "*".join(factors)
        if not body:
            parts.append(str(coef))
        elif coef == 1:
            parts.append(body)
        elif coef == -1:
            parts.append("-" + body)
        else:
            parts.append(f"{coef}*{body}")
    return " + ".join(parts).replace("+ -", "- ")


def trim_series(coeffs: Sequence[int]) -> Tuple[int, ...]:
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(int(c) for c in coeffs)


def series_product(*series: Sequence[int]) -> Tuple[int, ...]:
    out = np.array([1], dtype=object)
    for s in series:
        out = np.convolve(out, np.array(s, dtype=object))
    return trim_series(out.tolist())


def height(c: GradedClass) -> int:
    """Largest ``k`` with ``c**k != 0``; zero for the zero class."""
    if c.is_zero():
        return 0
    if c.degree == 0:
        raise RingError("height of a nonzero degree-0 class is unbounded")
    k, power = 1, c
    while True:
        power = power * c
        if power.is_zero():
            return k
        k += 1


def _bits(c: GradedClass, degree: int) -> int:
    return sum(1 << i for i, v in enumerate(c.vector(degree)) if v)


def in_principal_ideal(a: GradedClass, b: GradedClass) -> bool:
    """Decide ``a in (b)`` for homogeneous classes over Z/2."""
    ring = a.ring
    if ring.coefficients is not CoefficientRing.MOD_TWO:
        raise RingError("ideal membership is only implemented over Z/2")
    if b.ring is not ring:
        raise RingError("operands live in different rings")
    if a.is_zero():
        return True
    if b.is_zero():
        return False
    da, db = a.degree, b.degree
    if db > da:
        return False
    rows = [_bits(b * ring.monomial(m), da) for m in ring.basis(da - db)]
    return gf2.in_span(_bits(a, da), rows)


def relative_height(a: GradedClass, b: GradedClass) -> int:
    """Smallest ``k >= 0`` such that ``a**(k+1)`` lies in the ideal ``(b)``."""
    if a.ring.coefficients is not CoefficientRing.MOD_TWO:
        raise RingError("relative height is only implemented over Z/2")
    if a.is_zero():
        return 0
    if a.degree == 0:
        raise RingError("relative height needs a class of positive degree")
    b.degree  # homogeneity check
    k, power = 0, a
    while not in_principal_ideal(power, b):
        k += 1
        power = power * a
    return k
