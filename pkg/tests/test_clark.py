"""Clark spectra: exact extraction, radial approximation, disintegration."""

import math

import numpy as np
import pytest

from discmaps.clark import clark_blaschke, clark_radial, disintegration_check
from discmaps.disc import Arc, DomainError, unit
from discmaps.maps import Blaschke, ScaledRotation


def random_blaschke(rng, max_degree=5):
    deg = int(rng.integers(1, max_degree + 1))
    zeros = []
    for _ in range(deg):
        w = complex(*(0.5 * rng.standard_normal(2)))
        zeros.append(w if abs(w) < 0.85 else 0.8 * w / abs(w))
    return Blaschke(zeros, rng.uniform(0, 1))


class TestClarkBlaschke:
    def test_squaring_map_at_alpha_one(self):
        # xi^2 = 1 at xi = 1 and -1; the phase slope is 2 at both
        spectrum = clark_blaschke(Blaschke([0, 0]), alpha=0.0)
        atoms = sorted(spectrum.atoms)
        assert atoms[0][0] == pytest.approx(0.0, abs=1e-12)
        assert atoms[1][0] == pytest.approx(0.5, abs=1e-12)
        assert atoms[0][1] == pytest.approx(0.5, abs=1e-12)
        assert atoms[1][1] == pytest.approx(0.5, abs=1e-12)
        assert spectrum.total_mass == pytest.approx(1.0, abs=1e-12)
        assert spectrum.imaginary_constant == pytest.approx(0.0, abs=1e-14)

    def test_total_mass_identity_at_the_origin(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            f = random_blaschke(rng)
            alpha = rng.uniform(0, 1)
            spectrum = clark_blaschke(f, alpha)
            f0 = complex(f(0.0))
            want = (1 - abs(f0) ** 2) / abs(unit(alpha) - f0) ** 2
            assert spectrum.total_mass == pytest.approx(want, abs=1e-10)

    def test_validation_residual_is_small(self):
        spectrum = clark_blaschke(Blaschke([0.3, -0.4j, 0.2]), alpha=0.63)
        assert spectrum.validation_residual < 1e-8

    def test_atom_count_equals_degree(self):
        f = Blaschke([0.1, 0.2, 0.3, 0.4, 0.5])
        assert len(clark_blaschke(f, 0.21).atoms) == 5

    def test_measure_export(self):
        sigma = clark_blaschke(Blaschke([0, 0]), 0.0).measure()
        assert sigma.atom_count == 2
        assert sigma.total_mass == pytest.approx(1.0, abs=1e-12)

    def test_rejects_non_blaschke(self):
        with pytest.raises(TypeError):
            clark_blaschke(ScaledRotation(0.5), 0.0)
        with pytest.raises(TypeError):
            clark_blaschke(Blaschke([]), 0.0)

    def test_poisson_matches_herglotz_real_part(self):
        f = Blaschke([0.25, -0.3])
        alpha = 0.4
        spectrum = clark_blaschke(f, alpha)
        a = unit(alpha)
        for z in (0.2, 0.5j, -0.4 + 0.3j):
            want = ((a + complex(f(z))) / (a - complex(f(z)))).real
            assert spectrum.poisson(z) == pytest.approx(want, abs=1e-10)


class TestClarkRadial:
    def test_identity_total_mass(self):
        approx = clark_radial(Blaschke([0.0]), 0.0, radius=0.9)
        assert approx.total_mass() == pytest.approx(1.0, abs=1e-6)
        assert approx.total_mass(halfway=True) == pytest.approx(1.0,
                                                                abs=1e-6)

    def test_mass_concentrates_near_the_atom(self):
        # identity at alpha = 0: the Clark measure is the unit atom at 0
        approx = clark_radial(Blaschke([0.0]), 0.0, radius=0.996)
        near = approx.arc_mass(Arc(-0.05, 0.1))
        assert near > 0.95

    def test_drift_shrinks_with_radius(self):
        f = Blaschke([0.3, -0.2j])
        loose = clark_radial(f, 0.13, radius=0.9).weak_star_drift()
        tight = clark_radial(f, 0.13, radius=0.99).weak_star_drift()
        assert tight < loose

    def test_radius_validation(self):
        with pytest.raises(DomainError):
            clark_radial(Blaschke([0.0]), 0.0, radius=1.0)


class TestDisintegration:
    def test_constant_test_function_is_exact(self):
        defect = disintegration_check(Blaschke([0, 0]),
                                      lambda t: np.ones_like(t))
        assert defect < 1e-12

    def test_trig_polynomial_average(self):
        f = Blaschke([0.3, -0.4j, 0.2])
        defect = disintegration_check(f, lambda t: np.cos(2 * np.pi * t))
        assert defect < 1e-8

    def test_rejects_non_blaschke(self):
        with pytest.raises(TypeError):
            disintegration_check(ScaledRotation(0.9), lambda t: t)
