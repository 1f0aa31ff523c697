"""Aleksandrov-Clark measures of disc self-maps.

For a self-map f and unimodular alpha, (alpha+f)/(alpha-f) has positive
real part, hence is the Herglotz integral of a positive measure sigma_alpha
plus an imaginary constant.  For finite Blaschke products sigma_alpha is
purely atomic on the n boundary solutions of f = alpha with masses
1/|f'(xi_k)|; these are extracted exactly here.  For general maps the
radial samples of Re[(alpha+f)/(alpha-f)] approximate sigma_alpha weakly.
"""

import math

import numpy as np

from .disc import DomainError, poisson_kernel, unit
from .maps import Blaschke, BlaschkePhase
from .measures import BoundaryMeasure

_VALIDATION_CEILING = 1e-6


class ClarkSpectrum:
    """Atomic Clark measure of a finite Blaschke product.

    atoms: tuple of (angle in turns, mass); imaginary_constant is the
    constant C with (alpha+f(0))/(alpha-f(0)) = integral + iC;
    validation_residual is the largest absolute defect of the identity

        sum_k m_k P(z, xi_k) = (1 - |f(z)|^2) / |alpha - f(z)|^2

    over the random interior points probed at extraction time.
    """

    __slots__ = ("alpha", "atoms", "imaginary_constant",
                 "validation_residual")

    def __init__(self, alpha, atoms, imaginary_constant, residual):
        self.alpha = float(alpha)
        self.atoms = tuple((float(t) % 1.0, float(m)) for t, m in atoms)
        self.imaginary_constant = float(imaginary_constant)
        self.validation_residual = float(residual)

    @property
    def total_mass(self):
        return sum(m for _, m in self.atoms)

    def measure(self):
        return BoundaryMeasure(atoms=self.atoms)

    def poisson(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape)
        for t, m in self.atoms:
            out = out + m * poisson_kernel(z, t)
        return float(out) if out.ndim == 0 else out

    def __repr__(self):
        return (f"ClarkSpectrum(alpha={self.alpha!r}, "
                f"atoms={len(self.atoms)}, "
                f"residual={self.validation_residual:.2e})")


def _positive_real_part(f_value, alpha_point):
    w = (alpha_point + f_value) / (alpha_point - f_value)
    return w


def clark_blaschke(f, alpha, phase=None, validation_points=100, rng=None):
    """Exact Clark spectrum of a finite Blaschke product at angle alpha.

    The boundary phase of f is strictly increasing with total increase
    equal to the degree, so f = e^{2 pi i alpha} has exactly `degree`
    boundary solutions, one per winding sector.  Masses are reciprocals
    of the phase slope (the modulus of the angular derivative).
    """
    if not isinstance(f, Blaschke) or f.degree == 0:
        raise TypeError("exact Clark extraction needs a finite Blaschke "
                        "product of positive degree")
    if phase is None:
        phase = BlaschkePhase(f)
    roots = phase.preimages(alpha)
    slopes = f.phase_slope(np.array(roots))
    atoms = [(t, 1.0 / s) for t, s in zip(roots, slopes)]

    a = unit(alpha)
    f0 = f(0.0)
    c_alpha = ((a + f0) / (a - f0)).imag

    rng = np.random.default_rng(0 if rng is None else rng)
    z = (0.95 * np.sqrt(rng.random(validation_points))
         * unit(rng.random(validation_points)))
    fz = f(z)
    target = (1.0 - np.abs(fz) ** 2) / np.abs(a - fz) ** 2
    got = np.zeros(validation_points)
    for t, m in atoms:
        got += m * poisson_kernel(z, t)
    residual = float(np.max(np.abs(got - target)))
    if residual > _VALIDATION_CEILING:
        raise DomainError(f"Clark identity residual {residual:.3e} "
                          "exceeds the validation ceiling")
    return ClarkSpectrum(alpha, atoms, c_alpha, residual)


class ClarkRadial:
    """Radial samples of the Clark density with a weak-* diagnostic.

    values[k] = Re[(alpha+f(z_k))/(alpha-f(z_k))] at z_k on the radius-r
    ring; halfway_values are the same at radius (1+r)/2.  Arc masses are
    trapezoid sums of the samples; their drift between the two radii
    measures how far the radial approximation is from settled.
    """

    __slots__ = ("alpha", "radius", "angles", "values", "halfway_values")

    def __init__(self, alpha, radius, angles, values, halfway_values):
        self.alpha = float(alpha)
        self.radius = float(radius)
        self.angles = angles
        self.values = values
        self.halfway_values = halfway_values

    def arc_mass(self, arc, halfway=False):
        """Trapezoid mass of the samples over a half-open arc."""
        vals = self.halfway_values if halfway else self.values
        rel = (self.angles - arc.start) % 1.0
        inside = rel < arc.length
        return float(np.sum(vals[inside])) / self.angles.size

    def weak_star_drift(self, depth=6):
        """Largest dyadic-arc mass change between radius r and (1+r)/2."""
        m = 1 << depth
        idx = np.minimum((self.angles * m).astype(int), m - 1)
        a = np.bincount(idx, weights=self.values, minlength=m)
        b = np.bincount(idx, weights=self.halfway_values, minlength=m)
        return float(np.max(np.abs(a - b))) / self.angles.size

    def total_mass(self, halfway=False):
        vals = self.halfway_values if halfway else self.values
        return float(np.mean(vals))


def clark_radial(f, alpha, radius, mesh=4096):
    """Sample the Poisson extension of sigma_alpha on two rings."""
    if not 0.0 < radius < 1.0:
        raise DomainError("radius must lie in (0, 1)")
    a = unit(alpha)
    t = np.arange(mesh) / mesh
    out = []
    for r in (radius, 0.5 * (1.0 + radius)):
        w = f(r * unit(t))
        gap = np.abs(a - w)
        if np.min(gap) < 1e-12:
            raise DomainError("f(r xi) hits alpha on the mesh; refine r")
        out.append(((a + w) / (a - w)).real)
    return ClarkRadial(alpha, radius, t, out[0], out[1])


def disintegration_check(f, g, mesh_alpha=512, mesh_circle=4096):
    """Defect in averaging the Clark measures back to Lebesgue measure.

    Computes |avg of g on the circle - avg over alpha of sigma_alpha(g)|
    with the inner integral the exact atom sum and the outer a trapezoid
    over mesh_alpha equispaced angles.  g is a callable of the angle in
    turns; for trigonometric polynomials of degree below mesh_circle/2
    both uniform averages are exact to rounding.
    """
    if not isinstance(f, Blaschke) or f.degree == 0:
        raise TypeError("disintegration check needs a finite Blaschke "
                        "product of positive degree")
    t = np.arange(mesh_circle) / mesh_circle
    lhs = float(np.mean(np.asarray(g(t), dtype=float)))

    phase = BlaschkePhase(f)
    n = f.degree
    base = float(phase(0.0))
    alphas = np.arange(mesh_alpha) / mesh_alpha
    firsts = base + ((alphas - base) % 1.0)
    roots = phase.invert_many((firsts[:, None] + np.arange(n)).ravel())
    masses = 1.0 / f.phase_slope(roots)
    per_alpha = np.sum((masses * np.asarray(g(roots), dtype=float))
                       .reshape(mesh_alpha, n), axis=1)
    total = 0.0
    for v in per_alpha:
        total += float(v)
    rhs = total / mesh_alpha
    return abs(lhs - rhs)
