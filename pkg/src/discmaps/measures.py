"""Positive measures on the circle and their box statistics.

A `BoundaryMeasure` carries up to three independent parts:

* point atoms (angle in turns, mass);
* a dyadic mass tree, an exact martingale (each parent mass is the float
  sum of its children by construction);
* a trigonometric-polynomial density against normalized Lebesgue measure.

All kernel integrals (Poisson, Herglotz, derivative moment) evaluate atoms
and densities exactly and tree parts leaf-by-leaf with the closed-form arc
antiderivatives from `disc`, so there is no quadrature error anywhere in
this module except the two-dimensional box averages of `b2_characteristic`,
which use a banded Gauss-Legendre x midpoint scheme.

Mass of a non-dyadic arc splits partially covered leaves proportionally;
`arc_mass_detail` reports the induced error bound (at most the mass of the
two cut leaves).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .disc import (
    Arc,
    DyadicArc,
    DomainError,
    TWO_PI,
    arc_derivative_integral,
    arc_herglotz_integral,
    arc_poisson_integral,
    norm_turns,
    unit,
)

MAX_TREE_DEPTH = 24
UNDERFLOW_FLOOR = 1e-300

# direct atom-by-ring products are chunked to keep temporaries below ~150 MB
_CHUNK = 2 ** 23


def _next_pow2(n):
    return 1 << max(0, int(n) - 1).bit_length()


# -- trigonometric-polynomial densities -------------------------------------


class TrigDensity:
    """Density c0 + sum_k (a_k cos 2 pi k t + b_k sin 2 pi k t), >= 0.

    Exact arc integrals and exact harmonic/Herglotz extensions: the Poisson
    extension of cos(2 pi k t) is Re z^k, of sin(2 pi k t) is Im z^k.
    """

    def __init__(self, c0, cos_coeffs=(), sin_coeffs=()):
        self.c0 = float(c0)
        self.cos_coeffs = np.asarray(cos_coeffs, dtype=float)
        self.sin_coeffs = np.asarray(sin_coeffs, dtype=float)
        k = max(len(self.cos_coeffs), len(self.sin_coeffs))
        self.cos_coeffs = np.pad(self.cos_coeffs, (0, k - len(self.cos_coeffs)))
        self.sin_coeffs = np.pad(self.sin_coeffs, (0, k - len(self.sin_coeffs)))
        self.degree = k
        if self.c0 < 0.0:
            raise ValueError("mean value must be nonnegative")
        probe = self(np.arange(8 * max(k, 1) + 1) / (8 * max(k, 1) + 1))
        if np.min(probe) < -1e-12 * max(1.0, self.c0):
            raise ValueError("density is negative on the circle")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.c0)
        for k in range(1, self.degree + 1):
            out = out + (self.cos_coeffs[k - 1] * np.cos(TWO_PI * k * t)
                         + self.sin_coeffs[k - 1] * np.sin(TWO_PI * k * t))
        return float(out) if out.ndim == 0 else out

    @property
    def total(self):
        return self.c0

    def _oscillatory(self, t):
        """Antiderivative of the mean-free part."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for k in range(1, self.degree + 1):
            w = TWO_PI * k
            out = out + (self.cos_coeffs[k - 1] * np.sin(w * t)
                         - self.sin_coeffs[k - 1] * np.cos(w * t)) / w
        return out

    def _antiderivative(self, t):
        return self.c0 * np.asarray(t, dtype=float) + self._oscillatory(t)

    def arc_integral(self, start, length):
        """Exact mass of [start, start + length); broadcasts.

        The mean's contribution is taken as c0 * length directly, so
        constant densities give bitwise-exact dyadic arc masses.
        """
        start = np.asarray(start, dtype=float)
        out = (self.c0 * length + self._oscillatory(start + length)
               - self._oscillatory(start))
        return float(out) if out.ndim == 0 else out

    def complex_coeffs(self):
        """Fourier coefficients c_hat_k = (a_k - i b_k)/2 for k = 1..degree."""
        return 0.5 * (self.cos_coeffs - 1j * self.sin_coeffs)

    def harmonic_extension(self, z):
        """u(z) = c0 + sum_k (a_k Re z^k + b_k Im z^k)."""
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.c0)
        zk = np.ones_like(z)
        for k in range(1, self.degree + 1):
            zk = zk * z
            out = out + (self.cos_coeffs[k - 1] * zk.real
                         + self.sin_coeffs[k - 1] * zk.imag)
        return float(out) if out.ndim == 0 else out

    def herglotz(self, z):
        """integral of (xi + z)/(xi - z) against the density: c0 + 2 sum c_hat_k z^k."""
        z = np.asarray(z, dtype=complex)
        ck = self.complex_coeffs()
        out = np.full(z.shape, self.c0, dtype=complex)
        zk = np.ones_like(z)
        for k in range(1, self.degree + 1):
            zk = zk * z
            out = out + 2.0 * ck[k - 1] * zk
        return complex(out) if out.ndim == 0 else out

    def derivative_moment(self, z):
        """integral of xi/(xi - z)^2 against the density: sum_k k c_hat_k z^(k-1)."""
        z = np.asarray(z, dtype=complex)
        ck = self.complex_coeffs()
        out = np.zeros(z.shape, dtype=complex)
        zk = np.ones_like(z)
        for k in range(1, self.degree + 1):
            out = out + k * ck[k - 1] * zk
            zk = zk * z
        return complex(out) if out.ndim == 0 else out

    def rotated(self, delta):
        """Density of t -> d(t - delta)."""
        ck = self.complex_coeffs()
        k = np.arange(1, self.degree + 1)
        ck = ck * np.exp(-2j * math.pi * k * delta)
        return TrigDensity(self.c0, 2.0 * ck.real, -2.0 * ck.imag)


# -- dyadic mass trees -------------------------------------------------------


class DyadicMassTree:
    """Martingale of masses over the dyadic arcs, stored as one pyramid.

    Built bottom-up from 2^N leaf masses; every internal node is the float
    sum of its two children, so tree consistency is exact by construction.
    Below the leaves, mass is split evenly (the uniform representative).
    """

    def __init__(self, leaf_masses):
        leaves = np.ascontiguousarray(leaf_masses, dtype=float)
        n = leaves.size
        if n == 0 or (n & (n - 1)) != 0:
            raise ValueError("leaf count must be a power of two")
        depth = n.bit_length() - 1
        if depth > MAX_TREE_DEPTH:
            raise ValueError(f"tree depth {depth} exceeds cap {MAX_TREE_DEPTH}")
        if not np.all(np.isfinite(leaves)) or np.any(leaves < 0.0):
            raise ValueError("leaf masses must be finite and nonnegative")
        self.depth = depth
        self._levels = [leaves]
        while self._levels[-1].size > 1:
            top = self._levels[-1]
            self._levels.append(top[0::2] + top[1::2])
        self._levels.reverse()
        pos = leaves[leaves > 0.0]
        # p^N underflows only far beyond desk scale, but flag it honestly
        self.underflow_risk = bool(pos.size and np.min(pos) < UNDERFLOW_FLOOR)

    @property
    def leaves(self):
        return self._levels[self.depth]

    @property
    def total(self):
        return float(self._levels[0][0])

    def level(self, n):
        """Masses of all 2^n dyadic arcs at depth n <= tree depth (a view)."""
        return self._levels[n]

    def masses_at_depth(self, n):
        """Masses of depth-n arcs; below the leaves mass splits evenly."""
        if n <= self.depth:
            return self._levels[n]
        split = 1 << (n - self.depth)
        return np.repeat(self.leaves / split, split)

    def node_mass(self, depth, index):
        if depth <= self.depth:
            return float(self._levels[depth][index])
        split = 1 << (depth - self.depth)
        return float(self.leaves[index >> (depth - self.depth)] / split)

    def _cdf(self, t):
        """Piecewise-linear CDF on [0, 1] (uniform inside each leaf)."""
        t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        n = self.leaves.size
        idx = np.minimum((t * n).astype(int), n - 1)
        pref = np.concatenate([[0.0], np.cumsum(self.leaves)])
        return pref[idx] + (t * n - idx) * self.leaves[idx]

    def arc_mass(self, start, length):
        start = norm_turns(start)
        end = start + length
        if end <= 1.0:
            out = self._cdf(end) - self._cdf(start)
        else:
            out = (self.total - self._cdf(start)) + self._cdf(end - 1.0)
        return float(out)

    def arc_cut_error(self, start, length):
        """Bound on the proportional-splitting error: mass of the cut leaves."""
        n = self.leaves.size
        err = 0.0
        for t in (norm_turns(start), norm_turns(start + length)):
            x = t * n
            if x != math.floor(x):
                err += float(self.leaves[min(int(x), n - 1)])
        return err

    def rolled(self, k):
        """Tree of the measure rotated by k leaf widths."""
        return DyadicMassTree(np.roll(self.leaves, k))


# -- boundary measures -------------------------------------------------------


class BoundaryMeasure:
    """Finite positive measure on the circle: atoms + dyadic tree + density."""

    def __init__(self, atoms=(), tree=None, density=None):
        pairs = [(norm_turns(float(t)), float(m)) for t, m in atoms]
        if any(m <= 0.0 for _, m in pairs):
            raise ValueError("atom masses must be positive")
        pairs.sort()
        self.atom_angles = np.array([t for t, _ in pairs], dtype=float)
        self.atom_masses = np.array([m for _, m in pairs], dtype=float)
        if tree is not None and not isinstance(tree, DyadicMassTree):
            tree = DyadicMassTree(tree)
        self.tree = tree
        self.density = density
        if self.total_mass <= 0.0:
            raise ValueError("measure must have positive total mass")

    # construction helpers

    @classmethod
    def from_atoms(cls, atoms):
        return cls(atoms=atoms)

    @classmethod
    def from_tree(cls, leaf_masses):
        return cls(tree=DyadicMassTree(np.asarray(leaf_masses, dtype=float)))

    @classmethod
    def from_density(cls, density):
        if not isinstance(density, TrigDensity):
            density = TrigDensity(density)
        return cls(density=density)

    @property
    def total_mass(self):
        out = float(np.sum(self.atom_masses))
        if self.tree is not None:
            out += self.tree.total
        if self.density is not None:
            out += self.density.total
        return out

    @property
    def atom_count(self):
        return self.atom_angles.size

    def atomized(self, density_depth=12):
        """Purely atomic surrogate: cell masses concentrated at cell centers.

        Tree leaves keep their exact masses; a density part is binned at
        2^density_depth cells.  Atom parts pass through unchanged.
        """
        atoms = list(zip(self.atom_angles, self.atom_masses))
        if self.tree is not None:
            n = self.tree.leaves.size
            atoms += [((k + 0.5) / n, m)
                      for k, m in enumerate(self.tree.leaves) if m > 0.0]
        if self.density is not None:
            n = 1 << density_depth
            starts = np.arange(n) / n
            cells = self.density.arc_integral(starts, 1.0 / n)
            atoms += [(s + 0.5 / n, m) for s, m in zip(starts, cells)
                      if m > 0.0]
        return BoundaryMeasure(atoms=atoms)

    def rotated(self, delta):
        """The pushforward under t -> t + delta (tree part needs a dyadic delta)."""
        atoms = [(t + delta, m)
                 for t, m in zip(self.atom_angles, self.atom_masses)]
        tree = None
        if self.tree is not None:
            shift = delta * self.tree.leaves.size
            if abs(shift - round(shift)) > 1e-12:
                raise ValueError("tree rotation must be a whole number of leaves")
            tree = self.tree.rolled(int(round(shift)))
        dens = self.density.rotated(delta) if self.density is not None else None
        return BoundaryMeasure(atoms=atoms, tree=tree, density=dens)

    # -- masses of arcs

    def arc_mass_detail(self, arc):
        """(mass of the half-open arc, error bound from cut tree leaves)."""
        start, length = arc.start, arc.length
        val = 0.0
        err = 0.0
        if self.atom_count:
            d = norm_turns(self.atom_angles - start)
            val += float(np.sum(self.atom_masses[d < length]))
        if self.tree is not None:
            val += self.tree.arc_mass(start, length)
            err = self.tree.arc_cut_error(start, length)
        if self.density is not None:
            val += self.density.arc_integral(start, length)
        return val, err

    def arc_mass(self, arc):
        return self.arc_mass_detail(arc)[0]

    def closed_arc_mass(self, start, length):
        """Mass of the closed arc [start, start + length] (atoms at both ends)."""
        start = norm_turns(start)
        val = 0.0
        if self.atom_count:
            d = norm_turns(self.atom_angles - start)
            val += float(np.sum(self.atom_masses[(d <= length) | (d == 0.0)]))
        if self.tree is not None:
            val += self.tree.arc_mass(start, min(length, 1.0))
        if self.density is not None:
            val += self.density.arc_integral(start, min(length, 1.0))
        return val

    def dyadic_masses(self, depth):
        """Vector of masses of all 2^depth dyadic arcs (exact for each part)."""
        m = 1 << depth
        out = np.zeros(m)
        if self.atom_count:
            idx = np.minimum((self.atom_angles * m).astype(int), m - 1)
            out += np.bincount(idx, weights=self.atom_masses, minlength=m)
        if self.tree is not None:
            out = out + self.tree.masses_at_depth(depth)
        if self.density is not None:
            starts = np.arange(m) / m
            out = out + self.density.arc_integral(starts, 1.0 / m)
        return out

    def rotated_masses(self, depth):
        """Masses of the half-step rotated arcs [(k+1/2) 2^-n, (k+3/2) 2^-n)."""
        fine = self.dyadic_masses(depth + 1)
        return fine[1::2] + np.roll(fine[0::2], -1)

    # -- kernel integrals at scattered points

    def _pointwise(self, z, atom_term, tree_kernel, density_term, dtype):
        z = np.asarray(z, dtype=complex)
        flat = np.atleast_1d(z).ravel()
        if np.any(np.abs(flat) >= 1.0):
            raise DomainError("evaluation point must lie inside the open disc")
        out = np.zeros(flat.shape, dtype=dtype)
        if self.atom_count:
            block = max(1, _CHUNK // max(1, self.atom_count))
            for i in range(0, flat.size, block):
                zz = flat[i:i + block, None]
                out[i:i + block] += np.sum(
                    self.atom_masses * atom_term(zz, unit(self.atom_angles)),
                    axis=1)
        if self.tree is not None:
            leaves = self.tree.leaves
            n = leaves.size
            starts = np.arange(n) / n
            dens = leaves * n
            block = max(1, _CHUNK // n)
            for i in range(0, flat.size, block):
                zz = flat[i:i + block, None]
                out[i:i + block] += np.sum(
                    dens * tree_kernel(zz, starts, 1.0 / n), axis=1)
        if self.density is not None:
            out += density_term(flat)
        return out.reshape(z.shape) if z.ndim else out[0].item()

    def poisson(self, z):
        """Harmonic extension u(z) = integral of P_z."""
        return self._pointwise(
            z,
            lambda zz, xi: (1.0 - np.abs(zz) ** 2) / np.abs(xi - zz) ** 2,
            arc_poisson_integral,
            (lambda f: self.density.harmonic_extension(f)),
            float)

    def herglotz(self, z):
        """H(z) = integral of (xi + z)/(xi - z); Re H = poisson."""
        return self._pointwise(
            z,
            lambda zz, xi: (xi + zz) / (xi - zz),
            arc_herglotz_integral,
            (lambda f: self.density.herglotz(f)),
            complex)

    def derivative_moment(self, z):
        """integral of xi/(xi - z)^2; equals H'(z)/2."""
        return self._pointwise(
            z,
            lambda zz, xi: xi / (xi - zz) ** 2,
            arc_derivative_integral,
            (lambda f: self.density.derivative_moment(f)),
            complex)

    # -- kernel integrals on whole rings
    #
    # Ring points z_k = r * unit((k + phase)/count).  The tree part reduces,
    # by rotation invariance of the kernels, to a circular cross-correlation
    # of the leaf densities with a fixed kernel row, done by FFT on the
    # common refinement of the ring grid and the leaf grid.

    def _tree_ring(self, r, count, phase, kernel):
        leaves = self.tree.leaves
        n = leaves.size
        grid = max(count, n)
        s1 = grid // n
        s2 = grid // count
        weights = np.zeros(grid)
        weights[::s1] = leaves * n
        offsets = (np.arange(grid) - phase * s2) / grid
        row = np.asarray(kernel(r, offsets, 1.0 / n))
        # correlation sum_g C_g K_(g-m): for complex kernels the usual
        # conj(FFT(K)) trick would conjugate K, so conjugate twice
        spec = np.conj(np.fft.fft(np.conj(row)))
        x = np.fft.ifft(np.fft.fft(weights) * spec)
        return x[::s2]

    def poisson_on_ring(self, r, count, phase=0.0):
        """u at the `count` ring points r * unit((k + phase)/count)."""
        if not 0.0 <= r < 1.0:
            raise DomainError("ring radius must be in [0, 1)")
        if count & (count - 1):
            raise ValueError("ring size must be a power of two")
        t = (np.arange(count) + phase) / count
        out = np.zeros(count)
        if self.atom_count:
            z = r * unit(t)
            block = max(1, _CHUNK // count)
            for i in range(0, self.atom_count, block):
                xi = unit(self.atom_angles[i:i + block])
                out += ((1.0 - r * r) *
                        (self.atom_masses[i:i + block]
                         / np.abs(xi - z[:, None]) ** 2)).sum(axis=1)
        if self.tree is not None:
            out += self._tree_ring(r, count, phase, arc_poisson_integral).real
        if self.density is not None:
            out += self.density.harmonic_extension(r * unit(t))
        return out

    def derivative_moment_on_ring(self, r, count, phase=0.0):
        """integral of xi/(xi - z)^2 at the ring points (= H'/2 there)."""
        if not 0.0 <= r < 1.0:
            raise DomainError("ring radius must be in [0, 1)")
        if count & (count - 1):
            raise ValueError("ring size must be a power of two")
        t = (np.arange(count) + phase) / count
        z = r * unit(t)
        out = np.zeros(count, dtype=complex)
        if self.atom_count:
            block = max(1, _CHUNK // count)
            for i in range(0, self.atom_count, block):
                xi = unit(self.atom_angles[i:i + block])
                out += (self.atom_masses[i:i + block]
                        * (xi / (xi - z[:, None]) ** 2)).sum(axis=1)
        if self.tree is not None:
            # the kernel at angle a pulls back to angle 0 with a phase factor
            corr = self._tree_ring(r, count, phase, arc_derivative_integral)
            out += corr * np.exp(-TWO_PI * 1j * t)
        if self.density is not None:
            out += self.density.derivative_moment(z)
        return out

    def herglotz_on_ring(self, r, count, phase=0.0):
        """H at the ring points."""
        if not 0.0 <= r < 1.0:
            raise DomainError("ring radius must be in [0, 1)")
        if count & (count - 1):
            raise ValueError("ring size must be a power of two")
        t = (np.arange(count) + phase) / count
        z = r * unit(t)
        out = np.zeros(count, dtype=complex)
        if self.atom_count:
            block = max(1, _CHUNK // count)
            for i in range(0, self.atom_count, block):
                xi = unit(self.atom_angles[i:i + block])
                out += (self.atom_masses[i:i + block]
                        * ((xi + z[:, None]) / (xi - z[:, None]))).sum(axis=1)
        if self.tree is not None:
            out += self._tree_ring(r, count, phase, arc_herglotz_integral)
        if self.density is not None:
            out += self.density.herglotz(z)
        return out

    def _angular_feature_depth(self, bands):
        """log2 of the finest angular scale the measure actually carries."""
        feats = [1]
        if self.tree is not None:
            feats.append(self.tree.depth)
        if self.density is not None:
            feats.append(max(1, (2 * max(1, self.density.degree)).bit_length()))
        if self.atom_count:
            feats.append(bands)  # atoms are never resolved; refine to the floor
        return max(feats)


def lebesgue():
    """Normalized arc-length measure (density identically one)."""
    return BoundaryMeasure(density=TrigDensity(1.0))


def dirac(t, mass=1.0):
    """Point mass at angle t (turns)."""
    return BoundaryMeasure(atoms=[(t, mass)])


# -- spec'd scalar operations ------------------------------------------------


def poisson_integral(sigma, z):
    """u(z), the harmonic extension of sigma at z."""
    return sigma.poisson(z)


def weighted_gradient(sigma, z):
    """(1 - |z|^2) |grad u|(z), via the identity with the derivative moment.

    The gradient of the Poisson extension satisfies
    (1 - |z|^2) |grad u| = 2 |integral of (1 - |z|^2) xi/(xi - z)^2 dsigma|.
    """
    z = np.asarray(z, dtype=complex)
    v = sigma.derivative_moment(z)
    out = 2.0 * (1.0 - np.abs(z) ** 2) * np.abs(v)
    return float(out) if out.ndim == 0 else out


def bernoulli_alternating_measure(p, depth):
    """Alternating-split Bernoulli mass tree of the given depth, total mass 1.

    Splitting a depth-d arc sends fraction 1-p to its left child when d is
    even and p when d is odd (so depth 1 is [1-p, p]).  Requires 0 < p < 1/2;
    p = 1/2 is excluded (it degenerates to Lebesgue measure).
    """
    if not 0.0 < p < 0.5:
        raise ValueError("p must lie strictly between 0 and 1/2")
    if not 0 <= depth <= MAX_TREE_DEPTH:
        raise ValueError(f"depth must be in [0, {MAX_TREE_DEPTH}]")
    leaves = np.array([1.0])
    for d in range(depth):
        left, right = ((1.0 - p), p) if d % 2 == 0 else (p, (1.0 - p))
        nxt = np.empty(2 * leaves.size)
        nxt[0::2] = leaves * left
        nxt[1::2] = leaves * right
        leaves = nxt
    return BoundaryMeasure(tree=DyadicMassTree(leaves))


# -- box-geometry scans -------------------------------------------------------


def _anchors_poisson(sigma, depth):
    """u at the anchors of the plain and rotated depth-n arcs (two vectors)."""
    r = 1.0 - 2.0 ** -depth
    count = 1 << depth
    plain = sigma.poisson_on_ring(r, count, phase=0.5)
    rot = np.roll(sigma.poisson_on_ring(r, count, phase=0.0), -1)
    return plain, rot


def condition_b_table(sigma, max_depth):
    """Per-depth minima of (sigma(I)/|I|) / u(z_I) over plain + rotated arcs.

    Returns a list of (depth, min_ratio, Arc) rows.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    rows = []
    for n in range(1, max_depth + 1):
        dens_plain = sigma.dyadic_masses(n) * (1 << n)
        dens_rot = sigma.rotated_masses(n) * (1 << n)
        u_plain, u_rot = _anchors_poisson(sigma, n)
        ratios_p = dens_plain / u_plain
        ratios_r = dens_rot / u_rot
        kp = int(np.argmin(ratios_p))
        kr = int(np.argmin(ratios_r))
        if ratios_p[kp] <= ratios_r[kr]:
            rows.append((n, float(ratios_p[kp]), DyadicArc(n, kp).to_arc()))
        else:
            scale = 2.0 ** -n
            rows.append((n, float(ratios_r[kr]),
                         Arc(norm_turns((kr + 0.5) * scale), scale)))
    return rows


def condition_b_constant(sigma, max_depth):
    """min over dyadic arcs of depth 1..max_depth (and their half-step
    rotations) of (sigma(I)/|I|) / u(z_I), with z_I the arc anchor."""
    return min(r for _, r, _ in condition_b_table(sigma, max_depth))


@dataclasses.dataclass(frozen=True)
class QuadSpec:
    """Quadrature layout for box averages.

    Radial bands [1 - 2^-j, 1 - 2^-j-1] each carry `radial_nodes`
    Gauss-Legendre nodes; angles use midpoint rings of size
    2^(band + angular_margin) capped by the measure's feature depth and by
    2^angular_cap.  `extra_bands` bands beyond the deepest box scale feed
    the boxes' inner collar, whose radial integral reuses the deepest
    evaluated ring (so box values at the target depth are regularized at
    scale 2^-(max_depth + extra_bands); this matters only for measures whose
    1/u is genuinely non-integrable, where the scan diverges with depth).
    """

    radial_nodes: int = 8
    angular_margin: int = 4
    extra_bands: int = 3
    angular_cap: int = 20


def b2_table(sigma, max_depth, quad=None, p=2.0):
    """Per-depth maxima of the box-average product over plain+rotated boxes.

    The tested quantity over a box Q is
        (avg of u over Q) * (avg of u^(-1/(p-1)) over Q)^(p-1)
    with averages against normalized area.  Quadrature is self-normalizing:
    the area of each box is accumulated through the same pipeline, so a
    constant u scores exactly 1 at every box.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if p <= 1.0:
        raise ValueError("exponent p must exceed 1")
    quad = quad or QuadSpec()
    bands = max_depth + quad.extra_bands
    cap = min(quad.angular_cap,
              sigma._angular_feature_depth(bands) + quad.angular_margin)
    nodes, gw = np.polynomial.legendre.leggauss(quad.radial_nodes)

    def fresh():
        return {n: [np.zeros(1 << n), np.zeros(1 << n)]
                for n in range(1, max_depth + 1)}

    acc_u, acc_v, acc_a = fresh(), fresh(), fresh()

    def accumulate(band, u_row, v_row, weight, count):
        # a box of depth n spans the radial bands j >= n only; the area
        # accumulator runs through the identical prefix pipeline so that a
        # constant u yields bitwise-equal numerator and normalizer
        pref_u = np.concatenate([[0.0], np.cumsum(np.tile(u_row, 2))])
        pref_v = np.concatenate([[0.0], np.cumsum(np.tile(v_row, 2))])
        pref_a = np.concatenate([[0.0], np.cumsum(np.ones(2 * count))])
        w = weight / count
        for n in range(1, min(band, max_depth) + 1):
            stride = count >> n
            a = np.arange(1 << n) * stride
            half = a + stride // 2
            for acc, pref in ((acc_u[n], pref_u), (acc_v[n], pref_v),
                              (acc_a[n], pref_a)):
                acc[0] += (pref[a + stride] - pref[a]) * w
                acc[1] += (pref[half + stride] - pref[half]) * w

    def ring_size(band):
        count = 1 << min(band + quad.angular_margin, cap)
        # every contributing depth needs at least two grid cells per box
        return max(count, 2 << min(band, max_depth))

    last_rows = None
    diverged = False
    for j in range(bands):
        lo, hi = 1.0 - 2.0 ** -j, 1.0 - 2.0 ** -(j + 1)
        count = ring_size(j)
        for q in range(quad.radial_nodes):
            r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes[q]
            weight = 0.5 * (hi - lo) * gw[q] * 2.0 * r
            u_row = sigma.poisson_on_ring(r, count, phase=0.5)
            if np.any(u_row <= 0.0):
                diverged = True
                break
            with np.errstate(over="raise"):
                try:
                    v_row = u_row ** (-1.0 / (p - 1.0))
                except FloatingPointError:
                    diverged = True
                    break
            accumulate(j, u_row, v_row, weight, count)
            last_rows = (u_row, v_row, count)
        if diverged:
            break
    if diverged:
        return [(n, math.inf) for n in range(1, max_depth + 1)]
    # collar [1 - 2^-bands, 1]: radial weight exact, angular profile frozen
    # at the deepest evaluated ring (regularizes non-integrable 1/u)
    u_row, v_row, count = last_rows
    collar = 2.0 ** -bands * (2.0 - 2.0 ** -bands)
    accumulate(bands, u_row, v_row, collar, count)

    rows = []
    for n in range(1, max_depth + 1):
        worst = 0.0
        for which in (0, 1):
            area = acc_a[n][which]
            avg_u = acc_u[n][which] / area
            avg_v = acc_v[n][which] / area
            worst = max(worst, float(np.max(avg_u * avg_v ** (p - 1.0))))
        rows.append((n, worst))
    return rows


def b2_characteristic(sigma, max_depth, quad=None, p=2.0):
    """sup over dyadic (and half-step rotated) Carleson boxes of depth
    1..max_depth of the box-average product; math.inf flags divergence."""
    return max(v for _, v in b2_table(sigma, max_depth, quad=quad, p=p))


def doubling_constant(sigma, max_depth):
    """sup of sigma(2I)/sigma(I) over dyadic and half-step rotated arcs of
    depth 1..max_depth; math.inf when a sampled arc has zero mass."""
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    worst = 0.0
    for n in range(1, max_depth + 1):
        fine = sigma.dyadic_masses(n + 1)
        plain = fine[0::2] + fine[1::2]
        rot = fine[1::2] + np.roll(fine[0::2], -1)
        dbl_plain = (np.roll(fine, 1) + fine
                     + np.roll(fine, -1) + np.roll(fine, -2))[0::2]
        dbl_rot = (fine + np.roll(fine, -1)
                   + np.roll(fine, -2) + np.roll(fine, -3))[0::2]
        for mass, dbl in ((plain, dbl_plain), (rot, dbl_rot)):
            if np.any(mass <= 0.0):
                return math.inf
            worst = max(worst, float(np.max(dbl / mass)))
    return worst


def symmetry_defect(sigma, depth):
    """max over adjacent depth-n arc pairs of |sigma(I)/sigma(I') - 1|;
    math.inf when some arc has zero mass."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    m = sigma.dyadic_masses(depth)
    if np.any(m <= 0.0):
        return math.inf
    ratio = m / np.roll(m, -1)
    return float(np.max(np.abs(np.concatenate([ratio, 1.0 / ratio]) - 1.0)))


@dataclasses.dataclass(frozen=True)
class CompressionReport:
    """Outcome of the heavy-arc compression search."""

    passed: bool
    heavy_count: int
    scan_depth: int
    truncated: bool
    worst_generations: int | None
    failures: tuple


def bounded_compression_test(sigma, epsilon, search_depth, heavy_threshold=1.0):
    """For every heavy dyadic arc (density >= heavy_threshold * total mass),
    search descendants within `search_depth` generations for one whose
    density has dropped by the factor epsilon; report pass/fail.

    The scan stops `search_depth` generations above the tree depth so that
    every heavy arc gets a full-depth search; when the tree is too shallow
    for that, the report is flagged truncated.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if search_depth < 1:
        raise ValueError("search_depth must be >= 1")
    if heavy_threshold <= 0.0:
        raise ValueError("heavy_threshold must be positive")
    total = sigma.total_mass
    deepest = sigma.tree.depth if sigma.tree is not None else 8 + search_depth
    scan = max(1, deepest - search_depth)
    truncated = sigma.tree is not None and sigma.tree.depth < 1 + search_depth
    reach = min(search_depth, deepest - 1) if truncated else search_depth

    dens = {d: sigma.dyadic_masses(d) * (1 << d) / total
            for d in range(1, scan + reach + 1)}
    failures = []
    heavy_count = 0
    worst = None
    for n in range(1, scan + 1):
        heavy = dens[n] >= heavy_threshold * (1.0 - 1e-12)
        heavy_count += int(np.sum(heavy))
        unresolved = heavy.copy()
        gen_needed = np.zeros(heavy.shape, dtype=int)
        for g in range(1, reach + 1):
            block = dens[n + g].reshape(1 << n, 1 << g).min(axis=1)
            hit = unresolved & (block <= epsilon * dens[n])
            gen_needed[hit] = g
            unresolved &= ~hit
            if not np.any(unresolved):
                break
        if np.any(gen_needed > 0):
            g = int(np.max(gen_needed))
            worst = g if worst is None else max(worst, g)
        for k in np.nonzero(unresolved)[0][:32]:
            failures.append(DyadicArc(n, int(k)))
    return CompressionReport(
        passed=not failures,
        heavy_count=heavy_count,
        scan_depth=scan,
        truncated=truncated,
        worst_generations=worst,
        failures=tuple(failures))


# -- measures on the closed disc ----------------------------------------------


class ZerosMeasure:
    """Measure on the closed disc built from a map's zero set and boundary data.

    Interior atoms sit at the zeros with mass 1 - |zero|^2; the boundary part
    is a `BoundaryMeasure` (twice the singular measure plus twice the
    log-reciprocal modulus as a density, for maps assembled from the standard
    factors).
    """

    def __init__(self, zeros=(), boundary=None):
        z = np.asarray(list(zeros), dtype=complex)
        if z.size and np.any(np.abs(z) >= 1.0):
            raise DomainError("zeros must lie strictly inside the disc")
        self.zeros = z
        self.interior_masses = 1.0 - np.abs(z) ** 2
        self.boundary = boundary

    @property
    def total_mass(self):
        out = float(np.sum(self.interior_masses))
        if self.boundary is not None:
            out += self.boundary.total_mass
        return out

    def poisson(self, z):
        """P[mu](z) with the closed-disc kernel (1 - |z|^2)/|1 - conj(w) z|^2."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape)
        if self.zeros.size:
            w = self.zeros.reshape((1,) * z.ndim + (-1,))
            out = out + np.sum(
                self.interior_masses * (1.0 - np.abs(z[..., None]) ** 2)
                / np.abs(1.0 - np.conj(w) * z[..., None]) ** 2, axis=-1)
        if self.boundary is not None:
            out = out + self.boundary.poisson(z)
        return float(out) if out.ndim == 0 else out

    def box_mass(self, box):
        """mu of the closed Carleson box over box.base."""
        arc = box.base
        out = 0.0
        if self.zeros.size:
            r = np.abs(self.zeros)
            ang = np.angle(self.zeros) / TWO_PI
            d = norm_turns(ang - arc.start)
            radial = (1.0 - r) <= arc.length + 1e-15
            angular = (d <= arc.length) | (d == 0.0)
            out += float(np.sum(self.interior_masses[radial & angular & (r > 0)]))
            # a zero at the origin belongs to every box of full radial reach
            at0 = (r == 0.0) & (arc.length >= 1.0 - 1e-15)
            out += float(np.sum(self.interior_masses[at0]))
        if self.boundary is not None:
            out += self.boundary.closed_arc_mass(arc.start, arc.length)
        return out

    def log_derivative(self, z):
        """The logarithmic-derivative integral: for a map f with this zeros
        measure, f'(z)/f(z) = -integral of dmu(w) / (|1 - conj(w) z|^2 tau),
        tau = (w - z)/(1 - conj(z) w); interior part simplifies to
        -1/((w - z)(1 - conj(w) z)), boundary part to -xi/(xi - z)^2."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        if self.zeros.size:
            w = self.zeros.reshape((1,) * z.ndim + (-1,))
            out = out - np.sum(
                self.interior_masses
                / ((w - z[..., None]) * (1.0 - np.conj(w) * z[..., None])),
                axis=-1)
        if self.boundary is not None:
            out = out - self.boundary.derivative_moment(z)
        return complex(out) if out.ndim == 0 else out
