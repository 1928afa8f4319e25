"""Cohomology of a sphere bundle with a section and of its fibrewise powers.

``H*(E)`` for the unit sphere bundle of ``xi = eta' + eps`` is
``H*(B)[u] / (u^2 - c*u)`` with ``c = e(eta')`` over Z or ``c = w_{q-1}(xi)``
over Z/2.  The r-fold fibre product adds classes ``v_1 .. v_{r-1}`` of the same
degree, each satisfying ``v_i^2 = e(eta'_i) * v_i``; ``ker`` of the diagonal
pullback is generated by ``v_i - e(eta'_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Tuple

from .bundles import BundleSpec, NotEtaEpsForm, euler_class_eta, sw_class
from .graded_ring import CoefficientRing, Generator, GradedClass, RingModel, height, relative_height


@dataclass(frozen=True)
class SphereBundleRing:
    spec: BundleSpec
    base_ring: RingModel
    ring: RingModel
    u: GradedClass
    relation_class: GradedClass
    euler_stiefel: GradedClass

    @property
    def q(self) -> int:
        return self.spec.rank

    @property
    def coefficients(self) -> CoefficientRing:
        return self.ring.coefficients


def build_sphere_bundle_ring(
    spec: BundleSpec, coefficients: CoefficientRing = CoefficientRing.INTEGERS
) -> SphereBundleRing:
    if spec.eps == 0:
        raise NotEtaEpsForm(f"section required: {spec} has no trivial summand")
    q = spec.rank
    if coefficients is CoefficientRing.INTEGERS:
        c_base = euler_class_eta(spec)
    else:
        c_base = sw_class(spec, q - 1)
    base_ring = c_base.ring
    pre = base_ring.extend([Generator("u", q - 1)], base_ring.top_degree + q - 1)
    u = pre.gen("u")
    ring = pre.with_rules({"u": (2, pre.embed(c_base) * u)})
    u = ring.gen("u")
    c = ring.embed(c_base)
    # Euler class of the Stiefel bundle: e(eta') for q even, 2u - e(eta') for q odd;
    # its mod-2 reduction is w_{q-1}(xi) in both cases
    euler = c if q % 2 == 0 else 2 * u - c
    return SphereBundleRing(spec, base_ring, ring, u, c, euler)


@dataclass(frozen=True)
class ErBModel:
    sphere_bundle: SphereBundleRing
    r: int
    ring: RingModel
    u: GradedClass
    v: Tuple[GradedClass, ...]
    euler_stiefel: GradedClass
    eta_prime: Tuple[GradedClass, ...]

    @property
    def q(self) -> int:
        return self.sphere_bundle.q

    @property
    def kernel_generators(self) -> Tuple[GradedClass, ...]:
        return tuple(v - e for v, e in zip(self.v, self.eta_prime))

    @cached_property
    def _images(self) -> List[GradedClass]:
        sb = self.sphere_bundle
        images = [sb.ring.gen(g.name) for g in sb.ring.generators]
        images += [sb.euler_stiefel] * (self.r - 1)
        return images

    def diagonal_pullback(self, c: GradedClass) -> GradedClass:
        """Ring map to the sphere-bundle ring: ``v_i -> e(Stiefel)``, others fixed."""
        if c.ring is not self.ring:
            raise ValueError("class does not belong to this model")
        target = self.sphere_bundle.ring
        powers: Dict[Tuple[int, int], GradedClass] = {}
        result = target.zero()
        for mono, coef in c.terms.items():
            term = target.scalar(coef)
            for i, e in enumerate(mono):
                if e:
                    key = (i, e)
                    if key not in powers:
                        powers[key] = self._images[i] ** e
                    term = term * powers[key]
            result = result + term
        return result


def build_erb_model(sb: SphereBundleRing, r: int) -> ErBModel:
    if r < 2:
        raise ValueError("r must be >= 2")
    q = sb.q
    names = [f"v{i}" for i in range(1, r)]
    top = r * (q - 1) + sb.spec.base.dim
    pre = sb.ring.extend([Generator(n, q - 1) for n in names], top)
    euler = pre.embed(sb.euler_stiefel)
    # v_i^2 = e(eta'_i) v_i with e(eta'_i) = 2 v_i - E (q odd) solves to v_i^2 = E v_i
    ring = pre.with_rules({n: (2, euler * pre.gen(n)) for n in names})
    euler = ring.embed(sb.euler_stiefel)
    v = tuple(ring.gen(n) for n in names)
    if q % 2 == 0:
        eta_prime = tuple(euler for _ in v)
    else:
        eta_prime = tuple(2 * vi - euler for vi in v)
    return ErBModel(sb, r, ring, ring.gen("u"), v, euler, eta_prime)


def kernel_cup_length_oracle(m: ErBModel) -> int:
    """Longest nonzero product of kernel generators, by exhaustive search.

    Exponent vectors are explored depth-first; a zero partial product prunes
    every extension of it.  Total length is capped at ``top // (q-1) + 1``.
    """
    gens = m.kernel_generators
    bound = m.ring.top_degree // (m.q - 1) + 1
    best = 0

    def search(i: int, current: GradedClass, total: int) -> None:
        nonlocal best
        if i == len(gens):
            best = max(best, total)
            return
        while True:
            search(i + 1, current, total)
            if total >= bound:
                return
            current = current * gens[i]
            total += 1
            if current.is_zero():
                return

    search(0, m.ring.one(), 0)
    return best


def closed_form_cup_length(sb: SphereBundleRing, r: int) -> int:
    """Height formula for the cup-length of the diagonal kernel.

    Over Z: ``h(e(Stiefel)) + r - 1``; over Z/2: ``h(w_{q-1} | w_q) + r - 1``.
    """
    if sb.coefficients is CoefficientRing.INTEGERS:
        return height(sb.euler_stiefel) + r - 1
    q = sb.q
    return relative_height(sw_class(sb.spec, q - 1), sw_class(sb.spec, q)) + r - 1
