"""Geometric primitives of the unit disc.

Conventions used across the package:

* boundary angles are measured in *turns*: the boundary point of angle t is
  ``exp(2*pi*i*t)``, so dyadic arcs have exactly representable endpoints;
* arc length is normalized, ``m(circle) = 1``;
* area is normalized, ``area(disc) = 1``;
* arcs are half open, ``[start, start + length)``.

Two hyperbolic distances are exposed.  ``hyperbolic_distance`` is the package
normalization ``0.5*log((1 + rho^2)/(1 - rho^2))`` (all reported constants
inherit it).  It is a monotone function of the pseudo-hyperbolic distance
``rho`` but degenerates quadratically at small separations and is therefore
not additive along geodesics; ``geodesic_distance`` (``artanh rho``) is the
additive metric and is what grid certification uses internally.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

TWO_PI = 2.0 * math.pi


class DomainError(ValueError):
    """A point lies outside the domain an operation requires."""


def unit(t):
    """Boundary point exp(2*pi*i*t) for an angle t in turns."""
    return np.exp((TWO_PI * 1j) * np.asarray(t, dtype=float))


def norm_turns(t):
    """Reduce an angle in turns to [0, 1)."""
    t = np.asarray(t, dtype=float)
    out = t - np.floor(t)
    # floor(x) == x for integral x, but -1e-17 - floor(-1e-17) rounds to 1.0
    out = np.where(out >= 1.0, out - 1.0, out)
    return float(out) if out.ndim == 0 else out


def angle_of(z):
    """Angle of a nonzero complex number in turns, in [0, 1)."""
    z = np.asarray(z, dtype=complex)
    return norm_turns(np.angle(z) / TWO_PI)


def _check_interior(z, what="point"):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError(f"{what} must lie strictly inside the unit disc")
    return z


def pseudo_hyperbolic(z, w):
    """Pseudo-hyperbolic distance rho(z, w) = |(z - w)/(1 - conj(w) z)|."""
    z = _check_interior(z)
    w = _check_interior(w)
    return np.abs((z - w) / (1.0 - np.conj(w) * z))


def hyperbolic_distance(z, w):
    """Hyperbolic distance 0.5*log((1 + rho^2)/(1 - rho^2)) = artanh(rho^2).

    Package normalization; see the module docstring for the caveat about
    additivity (use `geodesic_distance` for the length metric).
    """
    rho = pseudo_hyperbolic(z, w)
    return np.arctanh(rho * rho)


def geodesic_distance(z, w):
    """Additive hyperbolic metric artanh(rho); used for covering arguments."""
    return np.arctanh(pseudo_hyperbolic(z, w))


def disc_automorphism(a, w):
    """Involutive automorphism tau_a(w) = (a - w)/(1 - conj(a) w).

    Swaps 0 and a; tau_a(tau_a(w)) = w.
    """
    a = _check_interior(a, "parameter")
    w = np.asarray(w, dtype=complex)
    return (a - w) / (1.0 - np.conj(a) * w)


def poisson_kernel(z, t):
    """P_z(xi) = (1 - |z|^2)/|xi - z|^2 at xi = exp(2 pi i t).

    Normalized so that the integral against dm (total boundary mass 1) is 1.
    """
    z = _check_interior(z)
    xi = unit(t)
    return (1.0 - np.abs(z) ** 2) / np.abs(xi - z) ** 2


# -- arcs ------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Arc:
    """Half-open boundary arc [start, start + length), angles in turns."""

    start: float
    length: float

    def __post_init__(self):
        if not 0.0 < self.length <= 1.0:
            raise ValueError(f"arc length must be in (0, 1], got {self.length}")
        object.__setattr__(self, "start", float(norm_turns(self.start)))
        object.__setattr__(self, "length", float(self.length))

    @property
    def end(self):
        """Unreduced end angle start + length (may exceed 1)."""
        return self.start + self.length

    @property
    def center(self):
        return norm_turns(self.start + 0.5 * self.length)

    @property
    def anchor(self):
        """Anchor point z_I = (1 - |I|) * xi_I with xi_I the arc midpoint."""
        return complex((1.0 - self.length) * unit(self.center))

    def contains(self, t):
        d = norm_turns(np.asarray(t, dtype=float) - self.start)
        out = d < self.length
        return bool(out) if np.ndim(out) == 0 else out

    def doubled(self):
        """Concentric arc of twice the length (capped at the full circle)."""
        length = min(2.0 * self.length, 1.0)
        return Arc(norm_turns(self.center - 0.5 * length), length)


FULL_CIRCLE = Arc(0.0, 1.0)

MAX_DEPTH = 52  # dyadic endpoints stay exactly representable


@dataclasses.dataclass(frozen=True)
class DyadicArc:
    """Dyadic arc [k 2^-n, (k+1) 2^-n) identified by exact integers (n, k)."""

    depth: int
    index: int

    def __post_init__(self):
        if not 0 <= self.depth <= MAX_DEPTH:
            raise ValueError(f"depth must be in [0, {MAX_DEPTH}]")
        if not 0 <= self.index < (1 << self.depth):
            raise ValueError(f"index {self.index} out of range at depth {self.depth}")

    @property
    def length(self):
        return 2.0 ** -self.depth

    @property
    def start(self):
        return self.index * 2.0 ** -self.depth

    def to_arc(self):
        return Arc(self.start, self.length)

    @property
    def anchor(self):
        return self.to_arc().anchor

    def children(self):
        return (DyadicArc(self.depth + 1, 2 * self.index),
                DyadicArc(self.depth + 1, 2 * self.index + 1))

    def parent(self):
        if self.depth == 0:
            raise ValueError("the full circle has no parent")
        return DyadicArc(self.depth - 1, self.index >> 1)

    def contains(self, other):
        """Exact containment test for another dyadic arc."""
        return (other.depth >= self.depth
                and (other.index >> (other.depth - self.depth)) == self.index)


@dataclasses.dataclass(frozen=True)
class CarlesonBox:
    """Carleson box over a base arc: {z : 1 - |z| <= |I|, z/|z| in I}."""

    base: Arc

    @property
    def side(self):
        return self.base.length

    @property
    def area(self):
        """Normalized area |I|^2 (2 - |I|) (exact polar integral)."""
        side = self.base.length
        return side * side * (2.0 - side)

    @property
    def anchor(self):
        return self.base.anchor

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        inside = (1.0 - r) <= self.base.length
        on_base = self.base.contains(np.angle(z) / TWO_PI)
        out = inside & on_base & (r > 0.0)
        return bool(out) if out.ndim == 0 else out

    def in_top_half(self, z):
        """Membership in T(Q), the outer-radius half 1 - |z| >= |I|/2."""
        z = np.asarray(z, dtype=complex)
        out = self.contains(z) & ((1.0 - np.abs(z)) >= 0.5 * self.base.length)
        return bool(out) if out.ndim == 0 else out


def arc_of_point(z):
    """The arc I(z) centered at z/|z| of length 1 - |z|; inverse of Arc.anchor."""
    z = complex(z)
    r = abs(z)
    if r == 0.0:
        raise DomainError("arc_of_point is undefined at the origin")
    if r >= 1.0:
        raise DomainError("arc_of_point needs an interior point")
    length = 1.0 - r
    c = norm_turns(math.atan2(z.imag, z.real) / TWO_PI)
    return Arc(norm_turns(c - 0.5 * length), length)


# -- exact arc integrals of the standard kernels ---------------------------
#
# For z in the open disc and an arc A = [t0, t0 + L), the three integrals
# below have closed forms; they are the building blocks for every measure
# integral in the package (atoms are points, dyadic-tree leaves carry uniform
# density, trigonometric densities integrate by Fourier coefficients).


def _arg_increase(w0, w1):
    """Continuous increase of arg along an arc, folded into (0, 2 pi]."""
    d = np.angle(w1 * np.conj(w0))
    return np.where(d > 0.0, d, d + TWO_PI)


def arc_poisson_integral(z, start, length):
    """omega(z, A) = integral of P_z over the arc A = [start, start + length).

    Exact antiderivative: -L + (arg increase of (xi - z) along A)/pi.
    Broadcasts over z and (start, length); the full circle returns exactly 1.
    """
    z = np.asarray(z, dtype=complex)
    start = np.asarray(start, dtype=float)
    length = np.asarray(length, dtype=float)
    w0 = unit(start) - z
    w1 = unit(start + length) - z
    out = _arg_increase(w0, w1) / math.pi - length
    # the true value is >= 0; a value near -1 means the fold lost a full turn
    # (possible only when the complement carries sub-ulp harmonic mass)
    out = np.where(out < -0.5, out + 2.0, out)
    out = np.where(length >= 1.0, 1.0, out)
    tiny = length < 1e-13
    if np.any(tiny):
        # sub-ulp arcs: the fold above can misread a zero rounding as a full turn
        mid = unit(start + 0.5 * length)
        flat = length * (1.0 - np.abs(z) ** 2) / np.abs(mid - z) ** 2
        out = np.where(tiny, flat, out)
    return float(out) if out.ndim == 0 else out


def arc_herglotz_integral(z, start, length):
    """Integral of (xi + z)/(xi - z) dm(xi) over an arc, continuous branch.

    Equals -L + (1/(pi i)) * (Log(xi1 - z) - Log(xi0 - z)); its real part is
    `arc_poisson_integral`.
    """
    z = np.asarray(z, dtype=complex)
    start = np.asarray(start, dtype=float)
    length = np.asarray(length, dtype=float)
    w0 = unit(start) - z
    w1 = unit(start + length) - z
    dre = 0.5 * np.log((w1.real * w1.real + w1.imag * w1.imag)
                       / (w0.real * w0.real + w0.imag * w0.imag))
    dim = _arg_increase(w0, w1)
    # (dre + i*dim)/(i*pi) = dim/pi - i*dre/pi
    re = dim / math.pi - length
    re = np.where(re < -0.5, re + 2.0, re)  # same fold guard as the real kernel
    out = re - 1j * (dre / math.pi)
    out = np.where(length >= 1.0, 1.0 + 0.0j, out)
    return complex(out) if out.ndim == 0 else out


def arc_derivative_integral(z, start, length):
    """Integral of xi/(xi - z)^2 dm(xi) over an arc (exact, no branch issues).

    Antiderivative (1/(2 pi i)) * (1/(xi0 - z) - 1/(xi1 - z)).
    """
    z = np.asarray(z, dtype=complex)
    length = np.asarray(length, dtype=float)
    xi0 = unit(start)
    xi1 = unit(np.asarray(start, dtype=float) + length)
    out = (1.0 / (xi0 - z) - 1.0 / (xi1 - z)) / (2j * math.pi)
    out = np.where(length >= 1.0, 0.0j, out)
    return complex(out) if out.ndim == 0 else out
