"""Self-maps: factor classes, hyperbolic derivatives, sup certification."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discmaps.disc import DomainError, unit
from discmaps.maps import (
    Blaschke,
    BlaschkePhase,
    Compose,
    HyperbolicGridSpec,
    Outer,
    Product,
    ScaledRotation,
    SingularInnerAtoms,
    derivative,
    evaluate,
    hyperbolic_derivative,
    map_from_clark_measure,
    sup_hyperbolic_derivative,
)
from discmaps.measures import dirac

interior_points = st.complex_numbers(max_magnitude=0.95, allow_nan=False,
                                     allow_infinity=False)
zeros_strategy = st.lists(
    st.complex_numbers(max_magnitude=0.8, allow_nan=False,
                       allow_infinity=False),
    min_size=1, max_size=4)


def fd_derivative(f, z, h=1e-6):
    return (f(z + h) - f(z - h)) / (2.0 * h)


class TestScaledRotation:
    def test_values_and_derivative(self):
        f = ScaledRotation(0.5, 0.25)  # half scale, quarter turn
        assert complex(f(0.4)) == pytest.approx(0.2j, abs=1e-15)
        assert complex(derivative(f, 0.7j)) == pytest.approx(0.5j, abs=1e-15)

    def test_hyperbolic_derivative_closed_form(self):
        # D(rz) = r(1-|z|^2)/(1-r^2|z|^2)
        f = ScaledRotation(0.7)
        z = 0.6
        want = 0.7 * (1 - 0.36) / (1 - 0.49 * 0.36)
        assert hyperbolic_derivative(f, z).value == pytest.approx(want,
                                                                  rel=1e-14)

    def test_scale_validation(self):
        with pytest.raises(DomainError):
            ScaledRotation(1.2)


class TestBlaschke:
    def test_zero_must_be_interior(self):
        with pytest.raises(DomainError):
            Blaschke([1.0])

    def test_single_factor_normalization(self):
        # (|a|/a)(a-z)/(1 - conj(a) z) is positive at z = 0
        f = Blaschke([0.5j])
        assert complex(f(0.0)) == pytest.approx(0.5, abs=1e-15)

    def test_degree_one_is_an_isometry(self):
        f = Blaschke([0.4 - 0.3j], constant=0.37)
        for z in (0.0, 0.5, -0.2 + 0.6j, 0.9):
            assert hyperbolic_derivative(f, z).value == pytest.approx(
                1.0, abs=1e-12)

    def test_squaring_map_closed_form(self):
        f = Blaschke([0, 0])
        for z in (0.3 + 0.2j, 0.8, 0.01j):
            want = 2 * abs(z) / (1 + abs(z) ** 2)
            assert hyperbolic_derivative(f, z).value == pytest.approx(
                want, rel=1e-12)

    def test_boundary_modulus_one(self):
        f = Blaschke([0.3, -0.5j, 0.2 + 0.2j])
        w = f(unit(np.linspace(0, 1, 64, endpoint=False)) * 0.9999999)
        assert np.max(np.abs(np.abs(w) - 1.0)) < 1e-5

    @given(zeros=zeros_strategy, z=interior_points)
    @settings(max_examples=150, deadline=None)
    def test_schwarz_pick_ceiling(self, zeros, z):
        f = Blaschke(zeros)
        assert f.hyperbolic_derivative_values(
            np.array([z]))[0] <= 1.0 + 1e-9

    @given(zeros=zeros_strategy, z=interior_points)
    @settings(max_examples=60, deadline=None)
    def test_derivative_matches_finite_differences(self, zeros, z):
        f = Blaschke(zeros)
        got = complex(derivative(f, z))
        assert got == pytest.approx(fd_derivative(f, complex(z)),
                                    rel=1e-4, abs=1e-6)


class TestSingularInner:
    def test_value_at_origin(self):
        f = SingularInnerAtoms([(0.0, 1.0)])
        assert complex(f(0.0)) == pytest.approx(math.exp(-1), abs=1e-15)

    def test_modulus_below_one_inside(self):
        f = SingularInnerAtoms([(0.25, 0.5), (0.75, 0.5)])
        z = 0.7 * unit(np.linspace(0, 1, 32, endpoint=False))
        assert np.max(np.abs(f(z))) < 1.0

    def test_derivative_matches_finite_differences(self):
        f = SingularInnerAtoms([(0.1, 0.8)])
        z = 0.4 + 0.3j
        assert complex(derivative(f, z)) == pytest.approx(
            fd_derivative(f, z), rel=1e-6)


class TestOuter:
    def test_positive_log_modulus_rejected(self):
        with pytest.raises(DomainError):
            Outer([0.1], [0.05])

    def test_modulus_matches_density_extension(self):
        f = Outer([-0.4, 0.2], [0.1])
        dens = f.log_modulus_density()
        for z in (0.0, 0.3 - 0.2j, 0.7j):
            want = math.exp(-dens.harmonic_extension(z))
            assert abs(complex(f(z))) == pytest.approx(want, rel=1e-12)

    def test_density_round_trip(self):
        f = Outer([-0.5, 0.25], [0.125])
        neg = f.log_modulus_density()
        g = Outer([-neg.c0] + [-c for c in neg.cos_coeffs],
                  [-s for s in neg.sin_coeffs])
        for z in (0.2, 0.5j):
            assert complex(g(z)) == pytest.approx(complex(f(z)), rel=1e-12)


class TestHerglotzMap:
    def test_dirac_clark_measure_recovers_rotation(self):
        # the map whose Clark measure at angle 0 is a unit atom at angle 0
        # is the identity
        f = map_from_clark_measure(dirac(0.0), alpha=0.0)
        for z in (0.3, -0.4j, 0.6 + 0.2j):
            assert complex(f(z)) == pytest.approx(z, abs=1e-12)

    def test_two_atoms_give_a_degree_two_inner_map(self):
        from discmaps.measures import BoundaryMeasure
        f = map_from_clark_measure(
            BoundaryMeasure(atoms=[(0.0, 0.5), (0.5, 0.5)]), alpha=0.0)
        w = f(0.98 * unit(np.linspace(0, 1, 128, endpoint=False)))
        assert np.max(np.abs(w)) <= 1.0
        assert np.min(np.abs(w)) > 0.9  # inner: modulus near 1 at the rim

    def test_schwarz_pick_for_tree_measure(self):
        from discmaps.measures import bernoulli_alternating_measure
        f = map_from_clark_measure(bernoulli_alternating_measure(0.35, 8))
        z = 0.9 * unit(np.linspace(0, 1, 64, endpoint=False))
        assert np.max(f.hyperbolic_derivative_values(z)) <= 1.0 + 1e-9


class TestProductCompose:
    def test_product_values_multiply(self):
        f = Product([Blaschke([0.3]), ScaledRotation(0.9)])
        z = 0.2 + 0.4j
        want = complex(Blaschke([0.3])(z)) * complex(ScaledRotation(0.9)(z))
        assert complex(f(z)) == pytest.approx(want, abs=1e-14)

    def test_compose_chain_rule_for_hyperbolic_derivative(self):
        inner = Blaschke([0.2, -0.3j])
        outer = ScaledRotation(0.8, 0.1)
        h = Compose(outer, inner)
        z = 0.35 - 0.25j
        lhs = hyperbolic_derivative(h, z).value
        rhs = (hyperbolic_derivative(outer, complex(inner(z))).value
               * hyperbolic_derivative(inner, z).value)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_evaluate_helper_round_trip(self):
        f = Blaschke([0.1])
        assert complex(evaluate(f, 0.5)) == pytest.approx(complex(f(0.5)))


class TestGridSpec:
    def test_covered_radius(self):
        grid = HyperbolicGridSpec(6)
        assert grid.covered_radius == pytest.approx(1 - 2 ** -6)

    def test_ring_counts_are_powers_of_two(self):
        for _, count in HyperbolicGridSpec(8).rings():
            assert count & (count - 1) == 0

    def test_node_count_grows_with_coverage(self):
        assert (HyperbolicGridSpec(4).node_count()
                < HyperbolicGridSpec(8).node_count())

    def test_validation(self):
        with pytest.raises(DomainError):
            HyperbolicGridSpec(-1)
        with pytest.raises(DomainError):
            HyperbolicGridSpec(4, angular_mesh=0.0)


class TestSupEstimate:
    def test_scaled_rotation_attains_scale_at_center(self):
        # D(rz) peaks at z = 0 with value r
        est = sup_hyperbolic_derivative(ScaledRotation(0.7),
                                        HyperbolicGridSpec(6))
        assert est.lower == pytest.approx(0.7, abs=1e-9)
        assert est.certified_upper >= est.lower
        assert est.certified_upper <= 1.0

    def test_automorphism_sup_is_exactly_one(self):
        est = sup_hyperbolic_derivative(Blaschke([0.5]),
                                        HyperbolicGridSpec(5))
        assert est.lower == 1.0

    def test_upper_gap_bounded_by_lipschitz_radius(self):
        grid = HyperbolicGridSpec(6)
        est = sup_hyperbolic_derivative(ScaledRotation(0.4),
                                        grid)
        assert est.certified_upper - est.lower <= 4.0 * grid.mesh

    def test_tighter_mesh_tightens_the_enclosure(self):
        f = Blaschke([0, 0, 0.4])
        wide = sup_hyperbolic_derivative(f, HyperbolicGridSpec(6, 0.3))
        tight = sup_hyperbolic_derivative(f, HyperbolicGridSpec(6, 0.05))
        assert tight.certified_upper - tight.lower < (
            wide.certified_upper - wide.lower)
        # both enclose: the tight lower cannot exceed the wide upper
        assert tight.lower <= wide.certified_upper + 1e-12


class TestBlaschkePhase:
    def test_preimage_count_equals_degree(self):
        f = Blaschke([0.3, -0.2j, 0.5, 0.1 + 0.1j])
        phase = BlaschkePhase(f)
        roots = phase.preimages(0.37)
        assert len(roots) == 4
        for t in roots:
            w = complex(f(0.999999999 * unit(t)))
            assert cmath.phase(w) / (2 * math.pi) % 1.0 == pytest.approx(
                0.37, abs=1e-6)

    def test_phase_is_increasing(self):
        phase = BlaschkePhase(Blaschke([0.4, 0.4j]))
        t = np.linspace(0, 1, 257)
        vals = np.array([phase(x) for x in t])
        assert np.all(np.diff(vals) > 0)

    def test_batched_inversion_matches_scalar(self):
        phase = BlaschkePhase(Blaschke([0.3, -0.2j, 0.5], constant=0.8))
        targets = np.linspace(-1.3, 4.2, 23)
        batch = phase.invert_many(targets)
        scalar = np.array([phase.invert(x) for x in targets])
        np.testing.assert_array_max_ulp(batch, scalar, maxulp=4)
