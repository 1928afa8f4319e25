from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tc_sphere.bundles import BundleSpec, NotEtaEpsForm, euler_class_eta, sw_class
from tc_sphere.cohomology_models import (
    build_erb_model,
    build_sphere_bundle_ring,
    closed_form_cup_length,
    kernel_cup_length_oracle,
)
from tc_sphere.graded_ring import CoefficientRing, Generator, series_product
from tc_sphere.spaces import BaseSpace

Z, Z2 = CoefficientRing.INTEGERS, CoefficientRing.MOD_TWO


def cp(n, eta=1, eps=1):
    return BundleSpec(BaseSpace.cp(n), eta, eps)


def rp(n, eta, eps=1):
    return BundleSpec(BaseSpace.rp(n), eta, eps)


POINT2 = BundleSpec(BaseSpace.point(), 0, 2)

INTEGRAL_CORPUS = [cp(n, 1, e) for n in range(1, 4) for e in (1, 2, 3)] + [
    cp(2, 2, 1),
    POINT2,
    BundleSpec(BaseSpace.point(), 0, 3),
    BundleSpec(BaseSpace.sphere(2), 0, 3),
    BundleSpec(BaseSpace.sphere(3), 0, 2),
]
MOD2_CORPUS = [rp(n, l) for n in range(1, 5) for l in range(1, 4)] + [cp(2), cp(3, 1, 2)]


def all_models(rs=(2, 3)):
    for spec in INTEGRAL_CORPUS:
        for r in rs:
            yield spec, Z, r
    for spec in MOD2_CORPUS:
        for r in rs:
            yield spec, Z2, r


# -- frozen examples -------------------------------------------------------------


def test_cp1_sphere_bundle_ring():
    sb = build_sphere_bundle_ring(cp(1))
    x, u = sb.ring.gen("x"), sb.ring.gen("u")
    assert sb.ring.gen("u").degree == 2
    assert u * u == x * u
    assert (x * x).is_zero()
    assert sb.ring.poincare_series() == (1, 0, 2, 0, 1)
    assert sb.euler_stiefel == 2 * u - x


def test_rp3_mod_two_sphere_bundle_ring():
    sb = build_sphere_bundle_ring(rp(3, 2), Z2)
    a, u = sb.ring.gen("a"), sb.ring.gen("u")
    assert u * u == a**2 * u
    assert (a**4).is_zero()
    assert sb.euler_stiefel == a**2


def test_point_sphere_bundle_ring():
    sb = build_sphere_bundle_ring(POINT2)
    u = sb.ring.gen("u")
    assert (u * u).is_zero() and u
    assert sb.euler_stiefel.is_zero()


def test_missing_section_rejected():
    with pytest.raises(NotEtaEpsForm):
        build_sphere_bundle_ring(cp(1, 1, 0))


def test_cp1_erb_relation():
    m = build_erb_model(build_sphere_bundle_ring(cp(1)), 2)
    x, u, v = m.ring.gen("x"), m.ring.gen("u"), m.v[0]
    e = 2 * u - x
    assert m.euler_stiefel == e
    assert v * v == (2 * v - e) * v
    assert m.eta_prime[0] == 2 * v - e


def test_even_rank_erb_relation():
    m = build_erb_model(build_sphere_bundle_ring(cp(2, 1, 2)), 3)
    assert m.q == 4 and m.euler_stiefel.is_zero()
    assert all((v * v).is_zero() for v in m.v)


def test_point_rank_two_erb():
    m = build_erb_model(build_sphere_bundle_ring(POINT2), 2)
    assert (m.v[0] * m.v[0]).is_zero()
    assert m.ring.poincare_series() == (1, 2, 1)


def test_diagonal_pullback_examples():
    sb = build_sphere_bundle_ring(cp(2))
    m = build_erb_model(sb, 3)
    assert m.diagonal_pullback(m.v[0]) == sb.euler_stiefel
    assert m.diagonal_pullback(m.u) == sb.u
    assert m.diagonal_pullback(m.kernel_generators[1]).is_zero()


@pytest.mark.parametrize(
    "spec, coeff, r, expected",
    [
        (cp(1), Z, 2, 2),
        (cp(2), Z, 2, 4),
        (cp(3), Z, 3, 5),
        (POINT2, Z, 2, 1),
        (POINT2, Z, 3, 2),
        (rp(3, 2), Z2, 2, 2),
        (rp(2, 1), Z2, 3, 4),
    ],
)
def test_oracle_frozen_values(spec, coeff, r, expected):
    sb = build_sphere_bundle_ring(spec, coeff)
    assert kernel_cup_length_oracle(build_erb_model(sb, r)) == expected
    assert closed_form_cup_length(sb, r) == expected


# -- invariants over the corpus ---------------------------------------------------


@pytest.mark.parametrize("spec, coeff, r", list(all_models()), ids=str)
def test_model_invariants(spec, coeff, r):
    sb = build_sphere_bundle_ring(spec, coeff)
    base_series = sb.base_ring.poincare_series()
    fibre = (1,) + (0,) * (spec.rank - 2) + (1,)
    assert sb.ring.poincare_series() == series_product(base_series, fibre)
    assert sb.u * sb.u == sb.relation_class * sb.u

    m = build_erb_model(sb, r)
    assert m.ring.poincare_series() == series_product(base_series, *[fibre] * r)
    for v, e in zip(m.v, m.eta_prime):
        assert v * v - e * v == m.ring.zero()
        assert m.diagonal_pullback(v - e).is_zero()
    product = m.ring.one()
    for k in m.kernel_generators:
        product = product * k
    assert all((v * product).is_zero() for v in m.v)


@pytest.mark.parametrize("spec, coeff, r", list(all_models((2, 3, 4))), ids=str)
def test_oracle_matches_closed_form(spec, coeff, r):
    sb = build_sphere_bundle_ring(spec, coeff)
    assert kernel_cup_length_oracle(build_erb_model(sb, r)) == closed_form_cup_length(sb, r)


def _monomial_classes(ring, max_terms=3):
    monos = [m for d in range(ring.top_degree + 1) for m in ring.basis(d)]
    return st.lists(st.tuples(st.sampled_from(monos), st.integers(-2, 2)), max_size=max_terms).map(
        lambda terms: sum((ring.monomial(m, c) for m, c in terms), ring.zero())
    )


MULT_MODEL = build_erb_model(build_sphere_bundle_ring(cp(2)), 3)
MULT_MODEL2 = build_erb_model(build_sphere_bundle_ring(rp(3, 2), Z2), 3)


@settings(max_examples=120, deadline=None)
@given(_monomial_classes(MULT_MODEL.ring), _monomial_classes(MULT_MODEL.ring))
def test_pullback_is_multiplicative(a, b):
    f = MULT_MODEL.diagonal_pullback
    assert f(a * b) == f(a) * f(b)
    assert f(a + b) == f(a) + f(b)


@settings(max_examples=80, deadline=None)
@given(_monomial_classes(MULT_MODEL2.ring), _monomial_classes(MULT_MODEL2.ring))
def test_pullback_is_multiplicative_mod_two(a, b):
    f = MULT_MODEL2.diagonal_pullback
    assert f(a * b) == f(a) * f(b)


# -- independent cross-check in the symmetric presentation -------------------------


def symmetric_cup_length(spec: BundleSpec, r: int, coeff: CoefficientRing) -> int:
    """Kernel cup-length computed in ``H*(B)[a_1..a_r] / (a_k^2 - c a_k)``.

    Here ``a_k`` is the fibre class of the ``k``-th factor and the diagonal
    kernel is generated by ``a_k - a_1``.  This presentation never mentions
    the Stiefel Euler class, so agreement is a genuine cross-check.
    """
    q = spec.rank
    c = euler_class_eta(spec) if coeff is Z else sw_class(spec, q - 1)
    names = [f"a{k}" for k in range(1, r + 1)]
    pre = c.ring.extend([Generator(n, q - 1) for n in names], r * (q - 1) + c.ring.top_degree)
    cc = pre.embed(c)
    ring = pre.with_rules({n: (2, cc * pre.gen(n)) for n in names})
    a = [ring.gen(n) for n in names]
    gens = [ak - a[0] for ak in a[1:]]
    best = 0
    cap = ring.top_degree // (q - 1) + 1
    for alphas in itertools.product(range(cap + 1), repeat=len(gens)):
        if sum(alphas) <= best or sum(alphas) > cap:
            continue
        prod = ring.one()
        for g, k in zip(gens, alphas):
            prod = prod * g**k
        if prod:
            best = sum(alphas)
    return best


@pytest.mark.parametrize(
    "spec, coeff, r",
    [(cp(n), Z, r) for n in (1, 2, 3) for r in (2, 3)]
    + [(rp(n, l), Z2, 2) for n in (2, 3, 4) for l in (1, 2, 3)],
    ids=str,
)
def test_symmetric_presentation_agrees(spec, coeff, r):
    sb = build_sphere_bundle_ring(spec, coeff)
    assert symmetric_cup_length(spec, r, coeff) == kernel_cup_length_oracle(build_erb_model(sb, r))
