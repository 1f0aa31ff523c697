"""Analytic self-maps of the unit disc.

Maps are represented structurally (Blaschke products, singular inner
factors with atomic measures, outer factors with trigonometric-polynomial
log-modulus, Herglotz transforms of boundary measures, scaled rotations,
products and compositions) so that values and derivatives come from closed
forms rather than generic numerics.

The hyperbolic derivative D(f)(z) = (1-|z|^2)|f'(z)|/(1-|f(z)|^2) is the
central quantity.  Schwarz-Pick gives D <= 1, with equality exactly for
disc automorphisms.  `sup_hyperbolic_derivative` reports an enclosure
(lower, certified_upper) for the supremum over a compactly contained
region: the lower bound is a grid maximum, the upper bound follows from
the Lipschitz estimate dist(D(z), D(w)) <= 2 dist(z, w) of Beardon and
Minda, applied in the additive metric artanh(rho) in which it holds.
"""

import cmath
import math

import numpy as np

from .disc import DomainError, geodesic_distance, unit
from .measures import BoundaryMeasure, TrigDensity

_BOUNDARY_TOL = 1e-14


def _next_pow2(n):
    return 1 << max(0, int(n - 1)).bit_length()


def _as_points(z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(np.atleast_1d(z)) >= 1.0):
        raise DomainError("self-maps are evaluated on the open disc only")
    return z


def _unimodular_head(a):
    """conj(a)/|a| componentwise; complex division overflows on subnormal
    zeros, two real divisions do not.  nan at a = 0 (callers mask it)."""
    m = np.abs(a)
    with np.errstate(invalid="ignore"):
        return (a.real / m) - 1j * (a.imag / m)


class SelfMap:
    """Base class: analytic f with |f| <= 1 on the open disc."""

    def _pair(self, z):
        """(f(z), f'(z)) for an ndarray of interior points."""
        raise NotImplementedError

    def __call__(self, z):
        z = _as_points(z)
        f, _ = self._pair(np.atleast_1d(z).ravel())
        return f.reshape(z.shape) if z.ndim else complex(f[0])

    def derivative(self, z):
        z = _as_points(z)
        _, df = self._pair(np.atleast_1d(z).ravel())
        return df.reshape(z.shape) if z.ndim else complex(df[0])

    def hyperbolic_derivative_values(self, z):
        """D(f) at an ndarray of points; no clamping."""
        z = np.atleast_1d(_as_points(z))
        w, dw = self._pair(z)
        den = 1.0 - np.abs(w) ** 2
        if np.any(den <= _BOUNDARY_TOL):
            raise DomainError("map value is on the boundary; "
                              "hyperbolic derivative degenerates")
        return (1.0 - np.abs(z) ** 2) * np.abs(dw) / den

    def _ring(self, r, count):
        """(f, D(f)) on the ring r*unit(k/count); subclasses may batch."""
        z = r * unit(np.arange(count) / count)
        w, dw = self._pair(z)
        den = np.maximum(1.0 - np.abs(w) ** 2, _BOUNDARY_TOL)
        return w, (1.0 - r * r) * np.abs(dw) / den


class ScaledRotation(SelfMap):
    """f(z) = r e^{2 pi i theta} z, 0 <= r <= 1, theta in turns."""

    def __init__(self, r, theta=0.0):
        if not 0.0 <= r <= 1.0:
            raise DomainError("scale must lie in [0, 1]")
        self.r = float(r)
        self.theta = float(theta)
        self._c = r * unit(theta)

    def _pair(self, z):
        return self._c * z, np.full(z.shape, self._c)


class Blaschke(SelfMap):
    """Finite Blaschke product with a global unimodular constant.

    Factors are normalized as (|a|/a)(a-z)/(1-conj(a)z); a zero at the
    origin contributes a plain z.  `constant` is an angle in turns.
    """

    def __init__(self, zeros, constant=0.0):
        zeros = np.asarray(list(zeros), dtype=complex)
        if zeros.size and np.max(np.abs(zeros)) >= 1.0:
            raise DomainError("Blaschke zeros must lie inside the disc")
        self.zeros = zeros
        self.constant = float(constant)
        self._c = unit(self.constant)

    @property
    def degree(self):
        return self.zeros.size

    def _factors(self, z):
        """Per-factor values and derivatives, shape (degree, npoints)."""
        a = self.zeros[:, None]
        head = _unimodular_head(a)
        vals = np.where(a == 0, z[None, :],
                        head * (a - z[None, :]) / (1.0 - np.conj(a) * z))
        ders = np.where(a == 0, 1.0 + 0j,
                        head * (np.abs(a) ** 2 - 1.0)
                        / (1.0 - np.conj(a) * z) ** 2)
        return vals, ders

    def _pair(self, z):
        if not self.zeros.size:
            return np.full(z.shape, self._c), np.zeros(z.shape, complex)
        vals, ders = self._factors(z)
        f = self._c * np.prod(vals, axis=0)
        # full product rule: exact at the zeros, degree is small
        df = np.zeros(z.shape, dtype=complex)
        for k in range(vals.shape[0]):
            others = np.prod(np.delete(vals, k, axis=0), axis=0) \
                if vals.shape[0] > 1 else np.ones(z.shape, complex)
            df += ders[k] * others
        return f, self._c * df

    def hyperbolic_derivative_values(self, z):
        if self.degree == 1:
            # Schwarz-Pick equality case: a single factor is an
            # automorphism, where the quotient cancels identically
            z = np.atleast_1d(_as_points(z))
            return np.ones(z.shape)
        return SelfMap.hyperbolic_derivative_values(self, z)

    def _ring(self, r, count):
        if self.degree == 1:
            z = r * unit(np.arange(count) / count)
            return self._pair(z)[0], np.ones(count)
        return SelfMap._ring(self, r, count)

    def boundary_value(self, t):
        """f(e^{2 pi i t}); unimodular, exact finite product."""
        t = np.asarray(t, dtype=float)
        xi = unit(np.atleast_1d(t))
        a = self.zeros[:, None]
        head = _unimodular_head(a)
        vals = np.where(a == 0, xi[None, :],
                        head * (a - xi[None, :]) / (1.0 - np.conj(a) * xi))
        out = self._c * np.prod(vals, axis=0)
        return out.reshape(t.shape) if t.ndim else out[0]

    def phase_slope(self, t):
        """d/dt of the boundary phase in turns: sum of Poisson kernels."""
        t = np.asarray(t, dtype=float)
        xi = unit(np.atleast_1d(t))
        out = np.zeros(xi.shape)
        for a in self.zeros:
            if a == 0:
                out += 1.0
            else:
                out += (1.0 - abs(a) ** 2) / np.abs(xi - a) ** 2
        return out.reshape(t.shape) if t.ndim else out[0]


class SingularInnerAtoms(SelfMap):
    """exp(-sum c_j (xi_j + z)/(xi_j - z)) for boundary atoms (t_j, c_j)."""

    def __init__(self, atoms):
        atoms = [(float(t) % 1.0, float(c)) for t, c in atoms]
        if any(c <= 0 for _, c in atoms):
            raise DomainError("singular inner weights must be positive")
        self.atoms = tuple(sorted(atoms))
        self._xi = unit(np.array([t for t, _ in self.atoms]))
        self._w = np.array([c for _, c in self.atoms])

    def _pair(self, z):
        xi, w = self._xi[:, None], self._w[:, None]
        s = np.sum(w * (xi + z[None, :]) / (xi - z), axis=0)
        ds = np.sum(w * 2.0 * xi / (xi - z) ** 2, axis=0)
        f = np.exp(-s)
        return f, -ds * f


class Outer(SelfMap):
    """Outer function from trigonometric-polynomial log|f| <= 0 on the circle.

    Stored through the nonnegative density g = -log|f|; then
    f = exp(-(Herglotz integral of g)).
    """

    def __init__(self, log_modulus_cos, log_modulus_sin=()):
        cos = [float(c) for c in log_modulus_cos]
        if not cos:
            raise DomainError("log-modulus needs at least its mean value")
        sin = [float(s) for s in log_modulus_sin]
        try:
            self._neg = TrigDensity(-cos[0], [-c for c in cos[1:]],
                                    [-s for s in sin])
        except ValueError:
            raise DomainError(
                "outer log-modulus must be <= 0 on the circle") from None

    def log_modulus_density(self):
        """-log|f| on the boundary as a TrigDensity (nonnegative)."""
        return self._neg

    def _pair(self, z):
        h = self._neg.herglotz(z)
        dh = 2.0 * self._neg.derivative_moment(z)
        f = np.exp(-h)
        return f, -dh * f


class HerglotzMap(SelfMap):
    """Self-map with prescribed Clark-type boundary measure.

    (alpha + f)/(alpha - f) = integral of (xi+z)/(xi-z) dsigma + iC, so
    f = alpha (W - 1)/(W + 1) with W the right-hand side.  Re W is the
    Poisson integral u of sigma, which keeps the hyperbolic derivative
    stable near the boundary: D(f) = (1-|z|^2)|W'| / (2u).
    """

    def __init__(self, measure, alpha=0.0, imaginary_constant=0.0):
        if not isinstance(measure, BoundaryMeasure):
            raise TypeError("measure must be a BoundaryMeasure")
        if measure.total_mass <= 0.0:
            raise DomainError("zero measure gives the constant alpha, "
                              "which is not a map into the disc")
        self.measure = measure
        self.alpha = float(alpha)
        self.imaginary_constant = float(imaginary_constant)
        self._a = unit(self.alpha)

    def _w(self, z):
        return self.measure.herglotz(z) + 1j * self.imaginary_constant

    def _pair(self, z):
        w = self._w(z)
        dw = 2.0 * self.measure.derivative_moment(z)
        f = self._a * (w - 1.0) / (w + 1.0)
        return f, self._a * 2.0 * dw / (w + 1.0) ** 2

    def hyperbolic_derivative_values(self, z):
        z = np.atleast_1d(_as_points(z))
        u = self.measure.poisson(z)
        dw = 2.0 * self.measure.derivative_moment(z)
        return (1.0 - np.abs(z) ** 2) * np.abs(dw) / (2.0 * u)

    def _ring(self, r, count):
        w = self.measure.herglotz_on_ring(r, count) \
            + 1j * self.imaginary_constant
        dw = 2.0 * self.measure.derivative_moment_on_ring(r, count)
        f = self._a * (w - 1.0) / (w + 1.0)
        dh = (1.0 - r * r) * np.abs(dw) / (2.0 * np.maximum(w.real, 1e-300))
        return f, dh


class Product(SelfMap):
    """Pointwise product of self-maps."""

    def __init__(self, factors):
        self.factors = tuple(factors)
        if not self.factors:
            raise DomainError("empty product")

    def _pair(self, z):
        vals, ders = zip(*(g._pair(z) for g in self.factors))
        f = np.prod(np.stack(vals), axis=0)
        df = np.zeros(z.shape, dtype=complex)
        for k in range(len(vals)):
            term = ders[k].copy()
            for j in range(len(vals)):
                if j != k:
                    term = term * vals[j]
            df += term
        return f, df


class Compose(SelfMap):
    """outer(inner(z)) with the chain rule."""

    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner

    def _pair(self, z):
        w, dw = self.inner._pair(z)
        if np.any(np.abs(w) >= 1.0):
            raise DomainError("inner map reached the boundary; "
                              "composition undefined there")
        g, dg = self.outer._pair(w)
        return g, dg * dw


def evaluate(f, z):
    return f(z)


def derivative(f, z):
    return f.derivative(z)


class HyperbolicDerivativeValue:
    """D(f) at a point; Schwarz-Pick bounds the value by 1."""

    __slots__ = ("value", "at")

    def __init__(self, value, at):
        self.value = float(value)
        self.at = complex(at)

    def __repr__(self):
        return f"HyperbolicDerivativeValue({self.value!r}, at={self.at!r})"


def hyperbolic_derivative(f, z):
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("point must lie inside the open disc")
    value = float(f.hyperbolic_derivative_values(np.array([z]))[0])
    return HyperbolicDerivativeValue(value, z)


class HyperbolicGridSpec:
    """Rings r_j = 1 - 2^-j, j = 0..J, with near-uniform hyperbolic spacing.

    Angular node counts are powers of two chosen so adjacent nodes on a
    ring are at most `angular_mesh` apart in the additive hyperbolic
    metric.  The radial gaps artanh(r_{j+1}) - artanh(r_j) are bounded by
    artanh(1/2), so every point of {|z| <= 1 - 2^-J} lies within

        mesh = artanh(1/2)/2 + angular_mesh/2

    of a node.  The annulus |z| > 1 - 2^-J is not covered.
    """

    def __init__(self, coverage_exponent, angular_mesh=0.15):
        if coverage_exponent < 0:
            raise DomainError("coverage exponent must be >= 0")
        if angular_mesh <= 0:
            raise DomainError("angular mesh must be positive")
        self.coverage_exponent = int(coverage_exponent)
        self.angular_mesh = float(angular_mesh)

    @property
    def covered_radius(self):
        return 1.0 - 2.0 ** -self.coverage_exponent

    @property
    def mesh(self):
        return math.atanh(0.5) / 2.0 + self.angular_mesh / 2.0

    def rings(self):
        """Yield (radius, angular count) pairs."""
        for j in range(self.coverage_exponent + 1):
            r = 1.0 - 2.0 ** -j
            if r == 0.0:
                yield 0.0, 1
            else:
                # hyperbolic length of one angular step: 2 pi r h/(1-r^2)
                need = 2.0 * math.pi * r / ((1.0 - r * r) * self.angular_mesh)
                yield r, _next_pow2(max(4, math.ceil(need)))

    def node_count(self):
        return sum(c for _, c in self.rings())


class SupEstimate:
    """Enclosure of sup D(f) over {|z| <= covered_radius}.

    `lower` is the exact maximum over the grid nodes (clamped to the
    Schwarz-Pick ceiling 1).  `certified_upper` pushes the best node value
    outward by the Lipschitz radius 2*mesh: with P = tanh(2*mesh),

        certified_upper = (lower + P)/(1 + lower*P),

    an upper bound for the supremum over the covered region.  Nothing is
    claimed about the uncovered annulus |z| > covered_radius.
    """

    __slots__ = ("lower", "certified_upper", "at", "mesh", "covered_radius")

    def __init__(self, lower, certified_upper, at, mesh, covered_radius):
        self.lower = lower
        self.certified_upper = certified_upper
        self.at = at
        self.mesh = mesh
        self.covered_radius = covered_radius

    @property
    def uncovered(self):
        return f"annulus |z| > {self.covered_radius!r} not covered"

    def __iter__(self):
        yield self.lower
        yield self.certified_upper

    def __repr__(self):
        return (f"SupEstimate(lower={self.lower!r}, "
                f"certified_upper={self.certified_upper!r}, at={self.at!r}, "
                f"mesh={self.mesh!r}, covered_radius={self.covered_radius!r})")


def sup_hyperbolic_derivative(f, grid):
    """Grid maximum of D(f) plus a certified regional upper bound."""
    if grid.node_count() == 0:
        raise DomainError("empty grid")
    best = -1.0
    best_at = 0.0 + 0.0j
    for r, count in grid.rings():
        _, dh = f._ring(r, count)
        dh = np.minimum(dh, 1.0)  # Schwarz-Pick ceiling, exact for floats
        k = int(np.argmax(dh))
        if dh[k] > best:
            best = float(dh[k])
            best_at = r * cmath.exp(2j * math.pi * k / count)
    p = math.tanh(2.0 * grid.mesh)
    upper = (best + p) / (1.0 + best * p)
    return SupEstimate(best, upper, best_at, grid.mesh, grid.covered_radius)


def map_from_clark_measure(sigma, alpha=0.0, imaginary_constant=0.0):
    """Self-map whose Clark measure at angle alpha is sigma."""
    return HerglotzMap(sigma, alpha, imaginary_constant)


# -- boundary phase machinery
#
# A finite Blaschke product of degree n has a strictly increasing boundary
# phase making n full turns; a Herglotz map of a purely atomic measure is
# inner with the same structure, one turn per atom.  Both support exact
# root-finding for f(xi) = alpha, which drives the Clark spectrum
# extraction and boundary preimages.


class BlaschkePhase:
    """Monotone boundary phase of a finite Blaschke product, in turns.

    phase(t) is continuous and increasing with phase(t+1) = phase(t) + n.
    The winding is pinned on a grid fine enough that the folded increment
    between neighbours stays below an eighth of a turn.
    """

    def __init__(self, blaschke):
        if blaschke.degree == 0:
            raise DomainError("constant map has no boundary phase")
        self.map = blaschke
        slope_bound = sum((1.0 + abs(a)) / (1.0 - abs(a))
                          for a in blaschke.zeros)
        self._m = _next_pow2(max(256, int(8.0 * slope_bound)))
        grid = np.arange(self._m + 1) / self._m
        vals = blaschke.boundary_value(grid)
        raw = np.angle(vals) / (2.0 * math.pi)
        inc = np.diff(raw)
        inc -= np.round(inc)  # fold to (-1/2, 1/2]; true increments are small
        self._grid_phase = np.concatenate(([raw[0]], raw[0] + np.cumsum(inc)))

    @property
    def degree(self):
        return self.map.degree

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        tt = np.atleast_1d(t)
        base = np.floor(tt)
        frac = tt - base
        pos = frac * self._m
        k = np.minimum(pos.astype(int), self._m - 1)
        anchor = self._grid_phase[k]
        # one folded correction step from the anchor node
        raw = np.angle(self.map.boundary_value(frac)) / (2.0 * math.pi)
        offset = raw - anchor
        offset -= np.round(offset)
        out = anchor + offset + base * self.degree
        return out.reshape(t.shape) if t.ndim else out[0]

    def invert(self, target):
        """The unique t in [t0, t0+1) per sector with phase(t) = target."""
        lo, hi = 0.0, 1.0
        phase_lo = float(self(0.0))
        # shift target into [phase_lo, phase_lo + degree)
        shift = math.floor((target - phase_lo) / self.degree)
        goal = target - shift * self.degree
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if float(self(mid)) < goal:
                lo = mid
            else:
                hi = mid
        t = 0.5 * (lo + hi)
        for _ in range(3):  # Newton polish on the monotone phase
            slope = float(self.map.phase_slope(t))
            if slope <= 0:
                break
            t -= (float(self(t)) - goal) / slope
        return t % 1.0

    def invert_many(self, targets):
        """`invert` over an array of targets, one array bisection.

        The iteration mirrors the scalar `invert`; boundary evaluations
        reduce in a shape-dependent order, so batched and one-at-a-time
        callers agree to an ulp or two rather than bitwise.
        """
        targets = np.asarray(targets, dtype=float)
        phase_lo = float(self(0.0))
        shift = np.floor((targets - phase_lo) / self.degree)
        goal = targets - shift * self.degree
        lo = np.zeros(goal.shape)
        hi = np.ones(goal.shape)
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            below = self(mid) < goal
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        t = 0.5 * (lo + hi)
        for _ in range(3):
            slope = self.map.phase_slope(t)
            ok = slope > 0
            t = t - np.where(ok, (self(t) - goal) / np.where(ok, slope, 1.0),
                             0.0)
        return t % 1.0

    def preimages(self, target_angle):
        """All degree solutions of f(e^{2 pi i t}) = e^{2 pi i target}."""
        base = float(self(0.0))
        first = base + ((target_angle - base) % 1.0)
        return sorted(self.invert(first + k) for k in range(self.degree))


class AtomicHerglotzPhase:
    """Boundary phase structure of a Herglotz map of finitely many atoms.

    On the circle the Herglotz integral is i*b(t) with
    b(t) = C + sum m_j cot(pi (t - s_j)), decreasing from +inf to -inf
    between consecutive atoms, so f = alpha (i b - 1)/(i b + 1) traverses
    the circle exactly once per gap.
    """

    def __init__(self, hmap):
        measure = hmap.measure
        if measure.tree is not None or measure.density is not None \
                or not measure.atom_count:
            raise DomainError("phase structure needs a purely atomic measure")
        self.map = hmap
        self.sites = np.asarray(measure.atom_angles, dtype=float)
        self.masses = np.asarray(measure.atom_masses, dtype=float)
        self.constant = hmap.imaginary_constant
        self.alpha = hmap.alpha

    @property
    def degree(self):
        return self.sites.size

    def _b(self, t):
        """b and b' at an ndarray of angles, chunked over the atoms."""
        t = np.asarray(t, dtype=float)
        val = np.full(t.shape, self.constant)
        der = np.zeros(t.shape)
        block = max(1, (1 << 22) // max(1, t.size))
        for i in range(0, self.degree, block):
            gaps = math.pi * (t[None, :] - self.sites[i:i + block, None])
            m = self.masses[i:i + block, None]
            val += np.sum(m / np.tan(gaps), axis=0)
            der -= math.pi * np.sum(m / np.sin(gaps) ** 2, axis=0)
        return val, der

    def preimages(self, target_angle):
        """Solutions of f(e^{2 pi i t}) = e^{2 pi i target}, one per gap.

        Angles with f = alpha correspond to b = +/- inf (the atom sites),
        f = -alpha to b = 0; in general f = alpha e^{i theta} pulls back
        to b = tan((pi - theta)/2) hit once in each inter-atom gap, where
        b decreases from +inf to -inf.
        """
        theta = 2.0 * math.pi * ((target_angle - self.alpha) % 1.0)
        if math.isclose(theta, 0.0, abs_tol=1e-15):
            return sorted(self.sites % 1.0)
        b_goal = math.tan((math.pi - theta) / 2.0)
        sites = np.sort(self.sites % 1.0)
        widths = np.diff(np.append(sites, sites[0] + 1.0))
        margin = np.minimum(1e-13, 1e-3 * widths)
        lo = sites + margin
        hi = sites + widths - margin
        # bisect to ~1e-8 brackets, then Newton finishes the digits
        steps = max(12, int(math.ceil(math.log2(float(np.max(widths)) / 1e-8))))
        for _ in range(steps):
            mid = 0.5 * (lo + hi)
            val, _ = self._b(mid)
            above = val > b_goal
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        t = 0.5 * (lo + hi)
        for _ in range(3):
            val, der = self._b(t)
            step = np.where(der < 0, (val - b_goal) / np.where(der < 0, der, -1.0), 0.0)
            t = np.clip(t - step, lo, hi)
        return sorted(t % 1.0)
