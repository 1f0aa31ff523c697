"""Theorem-level harnesses tying maps, measures and boundary sets together.

Covers the three-way contractivity report (hyperbolic-derivative supremum
against the boundary-measure conditions), the zeros-measure criterion with
its supporting lemma checks, boundary mixing through exact preimages and
harmonic measure, the B2-set test for boundary sets, the essential-norm
table, and the inscribed hyperbolic radius of an obstacle complement.
"""

import math

import numpy as np

from .disc import (Arc, CarlesonBox, DomainError, arc_poisson_integral,
                   hyperbolic_distance, unit)
from .maps import (AtomicHerglotzPhase, Blaschke, BlaschkePhase, HerglotzMap,
                   Outer, Product, ScaledRotation, SingularInnerAtoms,
                   sup_hyperbolic_derivative)
from .measures import (ZerosMeasure, b2_table, condition_b_table,
                       TrigDensity, BoundaryMeasure)

_FULL = 1.0 - 1e-15


class MeasurableSet:
    """Finite union of boundary arcs, kept as disjoint segments of [0, 1).

    Construction normalizes: every arc is folded into [0, 1), split at the
    wrap point, sorted, and overlapping or touching segments are merged.
    """

    __slots__ = ("segments", "_bulk")

    def __init__(self, arcs=()):
        self._bulk = None
        raw = []
        for a in arcs:
            start, length = float(a.start), float(a.length)
            if length <= 0.0:
                continue
            if length >= 1.0:
                raw = [(0.0, 1.0)]
                break
            s = start % 1.0
            e = s + length
            if e <= 1.0:
                raw.append((s, e))
            else:
                raw.append((s, 1.0))
                raw.append((0.0, e - 1.0))
        raw.sort()
        merged = []
        for s, e in raw:
            if merged and s <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], e))
            else:
                merged.append((s, e))
        if len(merged) > 1 and merged[0][0] == 0.0 and merged[-1][1] >= 1.0:
            # the two pieces meet across the wrap point
            s, e = merged.pop()
            merged[0] = (s - 1.0, merged[0][1])
        self.segments = tuple(merged)

    @classmethod
    def full_circle(cls):
        return cls([Arc(0.0, 1.0)])

    @property
    def arcs(self):
        return [Arc(s % 1.0, e - s) for s, e in self.segments]

    @property
    def measure(self):
        return sum(e - s for s, e in self.segments)

    @property
    def arc_count(self):
        return len(self.segments)

    def _segment_arrays(self):
        if self._bulk is None:
            self._bulk = (np.array([s for s, _ in self.segments]),
                          np.array([e for _, e in self.segments]))
        return self._bulk

    def intersection_length(self, arc):
        """Length of the overlap with a single half-open arc."""
        if arc.length >= 1.0:
            return self.measure
        a0 = arc.start % 1.0
        pieces = [(a0, min(a0 + arc.length, 1.0))]
        if a0 + arc.length > 1.0:
            pieces.append((0.0, a0 + arc.length - 1.0))
        if len(self.segments) > 64:
            # preimage sets under high-degree maps run to thousands of
            # segments; summation order differs from the scalar loop
            s, e = self._segment_arrays()
            total = 0.0
            for lo, hi in pieces:
                for sh in (0.0, 1.0):
                    total += float(np.sum(np.maximum(
                        0.0, np.minimum(e + sh, hi) - np.maximum(s + sh, lo))))
            return total
        total = 0.0
        for s, e in self.segments:
            for lo, hi in pieces:
                for sh in (0.0, 1.0):  # wrapped segments start below 0
                    total += max(0.0, min(e + sh, hi) - max(s + sh, lo))
        return total

    def complement(self):
        if not self.segments:
            return MeasurableSet.full_circle()
        gaps = []
        segs = [(s % 1.0, e - s) for s, e in self.segments]
        segs.sort()
        for k, (s, ln) in enumerate(segs):
            nxt = segs[(k + 1) % len(segs)][0] + (1.0 if k + 1 == len(segs)
                                                  else 0.0)
            if nxt > s + ln:
                gaps.append(Arc(s + ln, nxt - (s + ln)))
        return MeasurableSet(gaps)

    def __repr__(self):
        return f"MeasurableSet({self.arc_count} arcs, m={self.measure:.6f})"


def harmonic_measure(z, e):
    """omega(z, E): exact per-arc Poisson integrals, summed."""
    if isinstance(e, Arc):
        e = MeasurableSet([e])
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("harmonic measure needs an interior point")
    if e.arc_count > 64:
        s, end = e._segment_arrays()
        return float(np.sum(arc_poisson_integral(z, s % 1.0, end - s)))
    return float(sum(arc_poisson_integral(z, a.start, a.length)
                     for a in e.arcs))


def _phase_for(f):
    if isinstance(f, Blaschke):
        return BlaschkePhase(f)
    if isinstance(f, HerglotzMap):
        return AtomicHerglotzPhase(f)
    raise TypeError("boundary preimages need a finite Blaschke product "
                    "or a Herglotz map of a purely atomic measure")


def _preimage_arcs_blaschke(phase, start, length):
    n = phase.degree
    base = float(phase(0.0))
    first = base + ((start - base) % 1.0)
    out = []
    for k in range(n):
        t0 = phase.invert(first + k)
        t1 = phase.invert(first + length + k)
        out.append(Arc(t0, (t1 - t0) % 1.0))
    return out

def _preimage_arcs_atomic(phase, start, length):
    n = phase.degree
    alpha = phase.alpha
    t0s = phase.preimages(start)
    t1s = phase.preimages(start + length)
    frac0 = (start - alpha) % 1.0
    shift = 1 if frac0 + length >= 1.0 else 0
    out = []
    for j in range(n):
        t0 = t0s[j]
        t1 = t1s[(j + shift) % n]
        out.append(Arc(t0, (t1 - t0) % 1.0))
    return out


def boundary_preimage(f, e):
    """f^{-1}(E) on the boundary, exact through the monotone phase."""
    if isinstance(e, Arc):
        e = MeasurableSet([e])
    if e.measure >= _FULL:
        return MeasurableSet.full_circle()
    if not e.segments:
        return MeasurableSet([])
    phase = _phase_for(f)
    arcs = []
    for s, end in e.segments:
        if isinstance(phase, BlaschkePhase):
            arcs.extend(_preimage_arcs_blaschke(phase, s % 1.0, end - s))
        else:
            arcs.extend(_preimage_arcs_atomic(phase, s % 1.0, end - s))
    return MeasurableSet(arcs)


class MixingReport:
    """Two-sided mixing ratios over a batch of (arc, set) pairs.

    Each row compares the preimage density m(f^{-1}(E) cap I)/m(I) with
    the harmonic measure omega(f(z_I), E) seen from the arc's anchor
    point.  `lower_constant` is the smallest ratio (0 signals a pair the
    map fails to mix); `upper_constant` the largest.
    """

    __slots__ = ("rows", "lower_constant", "upper_constant", "skipped")

    def __init__(self, rows, lower, upper, skipped):
        self.rows = rows
        self.lower_constant = lower
        self.upper_constant = upper
        self.skipped = skipped


def mixing_report(f, arcs, sets):
    """Mixing ratios for every combination of the given arcs and sets."""
    rows = []
    skipped = []
    lo, hi = math.inf, -math.inf
    preimages = []
    for e in sets:
        e = MeasurableSet([e]) if isinstance(e, Arc) else e
        preimages.append((e, boundary_preimage(f, e)))
    for i_arc in arcs:
        z_anchor = i_arc.anchor
        fz = complex(f(z_anchor))
        for e, pre in preimages:
            om = harmonic_measure(fz, e)
            if om <= 0.0:
                skipped.append((i_arc, e))
                continue
            num = pre.intersection_length(i_arc) / i_arc.length
            ratio = num / om
            rows.append({"arc": i_arc, "set": e, "density": num,
                         "harmonic": om, "ratio": ratio,
                         "reciprocal": math.inf if ratio == 0.0
                         else 1.0 / ratio})
            lo = min(lo, ratio)
            hi = max(hi, ratio)
    if not rows:
        raise DomainError("every pair was skipped (empty sets?)")
    return MixingReport(rows, lo, hi, skipped)


class B2SetReport:
    """Depth-by-depth minima of (m(I cap E)/m(I)) / omega(z_I, E)."""

    __slots__ = ("per_depth", "chain", "verdict", "floor")

    def __init__(self, per_depth, chain, verdict, floor):
        self.per_depth = per_depth
        self.chain = chain
        self.verdict = verdict
        self.floor = floor


def b2_set_test(e, max_depth, stability=0.5):
    """Scan dyadic arcs (and half-step rotations) against a boundary set.

    The verdict is True when the per-depth minimum stays positive and
    keeps at least `stability` of its value across the last three depth
    doublings: a fixed threshold would be arbitrary for truncated sets,
    a trend is not.
    """
    if isinstance(e, Arc):
        e = MeasurableSet([e])
    if not 0.0 < e.measure < 1.0:
        raise DomainError("set must have measure strictly between 0 and 1")
    per_depth = []
    for n in range(1, max_depth + 1):
        m = 1 << n
        worst = math.inf
        for k in range(m):
            for offset in (0.0, 0.5 / m):
                arc = Arc(k / m + offset, 1.0 / m)
                num = e.intersection_length(arc) * m
                om = harmonic_measure(arc.anchor, e)
                worst = min(worst, num / om)
        per_depth.append(worst)
    chain = sorted({max(1, max_depth // 4), max(1, max_depth // 2),
                    max_depth})
    vals = [per_depth[n - 1] for n in chain]
    floor = stability * vals[0]
    verdict = bool(vals[-1] > 1e-12 and all(v >= floor for v in vals))
    return B2SetReport(per_depth, chain, verdict, floor)


# -- zeros measures and the pointwise lemma checks


def zeros_measure(f):
    """Measure on the closed disc read off a factorized self-map.

    Interior atom of mass 1-|a|^2 at each zero, twice the singular
    measure's atoms on the boundary, twice the log-reciprocal modulus of
    the outer factor as boundary density.
    """
    zeros = []
    atoms = []
    c0 = 0.0
    cos, sin = [], []
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Blaschke):
            zeros.extend(g.zeros)
        elif isinstance(g, SingularInnerAtoms):
            atoms.extend((t, 2.0 * c) for t, c in g.atoms)
        elif isinstance(g, Outer):
            neg = g.log_modulus_density()
            c0 += 2.0 * neg.c0
            for k, (a, b) in enumerate(zip(neg.cos_coeffs, neg.sin_coeffs)):
                while len(cos) <= k:
                    cos.append(0.0)
                    sin.append(0.0)
                cos[k] += 2.0 * a
                sin[k] += 2.0 * b
        elif isinstance(g, ScaledRotation):
            if g.r == 0.0:
                raise DomainError("the zero map has no zeros measure")
            zeros.append(0.0 + 0.0j)
            if g.r < 1.0:
                c0 += 2.0 * math.log(1.0 / g.r)
        elif isinstance(g, Product):
            stack.extend(g.factors)
        else:
            raise TypeError("zeros measure needs a declared factorization "
                            "(Blaschke, singular atoms, outer, products)")
    boundary = None
    if atoms or c0 > 0.0 or any(cos) or any(sin):
        density = TrigDensity(c0, cos, sin) if (c0 > 0.0 or any(cos)
                                                or any(sin)) else None
        boundary = BoundaryMeasure(atoms=atoms, density=density)
    return ZerosMeasure(zeros, boundary)


def closed_disc_poisson(mu, z):
    """P[mu](z) with the closed-disc kernel (1-|z|^2)/|1 - conj(w) z|^2."""
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("point must lie inside the open disc")
    return float(mu.poisson(z))


_LOG_DERIVATIVE_SIGN = None
_LOG_DERIVATIVE_RESIDUAL = None


def _calibrate_log_derivative():
    """Fix the sign in the logarithmic-derivative identity once, against
    the identity map at z = 0.5 where f'/f = 2 by hand."""
    global _LOG_DERIVATIVE_SIGN, _LOG_DERIVATIVE_RESIDUAL
    if _LOG_DERIVATIVE_SIGN is not None:
        return _LOG_DERIVATIVE_SIGN, _LOG_DERIVATIVE_RESIDUAL
    mu = ZerosMeasure([0.0 + 0.0j])
    z = 0.5 + 0.0j
    integral = -complex(mu.log_derivative(z))  # the raw integral, sign-free
    want = 2.0 + 0.0j  # f'/f for f(z)=z at 0.5
    if abs(-integral - want) <= abs(integral - want):
        _LOG_DERIVATIVE_SIGN = -1
        _LOG_DERIVATIVE_RESIDUAL = abs(-integral - want)
    else:
        _LOG_DERIVATIVE_SIGN = 1
        _LOG_DERIVATIVE_RESIDUAL = abs(integral - want)
    return _LOG_DERIVATIVE_SIGN, _LOG_DERIVATIVE_RESIDUAL


class Lemma3Report:
    """Pointwise checks of the zeros-measure comparison lemma.

    min_slack: worst value of log|f|^{-2} - P[mu] (the lower-bound check);
    rows: (hyperbolic distance to the zero set, ratio log|f|^{-2}/P[mu]);
    max_log_derivative_defect: worst |f'/f - s*integral| over the sample,
    with the calibrated sign s and its calibration residual attached.
    """

    __slots__ = ("min_slack", "rows", "max_log_derivative_defect",
                 "sign", "calibration_residual", "skipped")

    def __init__(self, min_slack, rows, defect, sign, residual, skipped):
        self.min_slack = min_slack
        self.rows = rows
        self.max_log_derivative_defect = defect
        self.sign = sign
        self.calibration_residual = residual
        self.skipped = skipped


def lemma3_checks(f, points):
    """Run the three pointwise checks at the given interior points."""
    mu = zeros_measure(f)
    sign, residual = _calibrate_log_derivative()
    min_slack = math.inf
    rows = []
    skipped = 0
    max_defect = 0.0
    zero_set = mu.zeros
    for z in np.asarray(points, dtype=complex):
        fz = complex(f(z))
        pz = float(mu.poisson(z))
        if abs(fz) < 1e-14:
            skipped += 1
            continue
        lhs = -2.0 * math.log(abs(fz))
        min_slack = min(min_slack, lhs - pz)
        if pz > 0.0:
            dist = math.inf if not zero_set.size else float(
                np.min(hyperbolic_distance(np.full(zero_set.shape, z),
                                           zero_set)))
            rows.append((dist, lhs / pz))
        dfz = complex(f.derivative(z))
        got = sign * (-complex(mu.log_derivative(z)))
        max_defect = max(max_defect, abs(dfz / fz - got))
    rows.sort()
    return Lemma3Report(min_slack, rows, max_defect, sign, residual, skipped)


# -- conditional box criterion


class Theorem2Scan:
    """Largest constant C for which every gated box passes the criterion.

    A box Q is gated in when P[mu](z_Q) <= C_gate; it passes when
    mu(closed Q)/l(Q) >= C * P[mu](z_Q).  `results` maps each candidate C
    to True or to the first violating box.
    """

    __slots__ = ("results", "best", "boxes_scanned")

    def __init__(self, results, best, boxes_scanned):
        self.results = results
        self.best = best
        self.boxes_scanned = boxes_scanned


def theorem2_scan(mu, c_grid, max_depth, gate=None):
    """Scan dyadic boxes plus half-step rotations to the given depth."""
    if max_depth < 1:
        raise DomainError("need at least depth 1")
    boxes = []
    for n in range(1, max_depth + 1):
        m = 1 << n
        for k in range(m):
            for offset in (0.0, 0.5 / m):
                arc = Arc(k / m + offset, 1.0 / m)
                pz = float(mu.poisson(arc.anchor))
                mass = mu.box_mass(CarlesonBox(arc))
                boxes.append((n, k, offset, pz, mass * m))
    results = {}
    best = None
    for c in sorted(float(c) for c in c_grid):
        c_gate = c if gate is None else gate
        verdict = True
        for n, k, offset, pz, ratio in boxes:
            if pz <= c_gate and ratio < c * pz:
                verdict = (n, k, offset, pz, ratio)
                break
        results[c] = verdict
        if verdict is True:
            best = c
    return Theorem2Scan(results, best, len(boxes))


# -- section 5 estimates


def essential_norm_estimate(f, c_levels, grid):
    """sup of D(f) over grid nodes with |f| > c, per level c."""
    absf = []
    dh = []
    for r, count in grid.rings():
        w, d = f._ring(r, count)
        absf.append(np.abs(w))
        dh.append(np.minimum(d, 1.0))
    absf = np.concatenate(absf)
    dh = np.concatenate(dh)
    rows = []
    for c in c_levels:
        mask = absf > c
        rows.append((float(c),
                     float(np.max(dh[mask])) if np.any(mask) else 0.0,
                     int(np.count_nonzero(mask))))
    return rows


class InscribedRadius:
    """Lower bound for the largest hyperbolic ball avoiding the obstacles."""

    __slots__ = ("value", "at", "unbounded", "covered_radius")

    def __init__(self, value, at, unbounded, covered_radius):
        self.value = value
        self.at = at
        self.unbounded = unbounded
        self.covered_radius = covered_radius


def inscribed_hyperbolic_radius(obstacles, grid):
    """Max over grid nodes of the distance to the obstacle set.

    Obstacles are points or (center, hyperbolic radius) balls.  With no
    obstacles the region is the whole disc: flagged unbounded.
    """
    items = []
    for ob in obstacles:
        if isinstance(ob, tuple):
            items.append((complex(ob[0]), float(ob[1])))
        else:
            items.append((complex(ob), 0.0))
    if not items:
        return InscribedRadius(math.inf, None, True, grid.covered_radius)
    centers = np.array([c for c, _ in items])
    radii = np.array([r for _, r in items])
    best = -1.0
    best_at = None
    for r, count in grid.rings():
        z = r * unit(np.arange(count) / count)
        d = hyperbolic_distance(z[:, None], centers[None, :]) - radii
        d = np.min(np.maximum(d, 0.0), axis=1)
        k = int(np.argmax(d))
        if d[k] > best:
            best = float(d[k])
            best_at = complex(z[k])
    return InscribedRadius(best, best_at, False, grid.covered_radius)


# -- the three-way contractivity report


class TheoremReport:
    """Contractivity evidence for one map from three directions at once.

    Axes hold per-criterion verdicts ("contractive", "not", or
    "inconclusive"); the overall verdict is `inconsistent` only when two
    axes reach opposite firm conclusions.
    """

    __slots__ = ("map_id", "d_lower", "d_certified_upper",
                 "condition_b_constant", "b2_characteristic",
                 "tables", "axes", "verdict")

    def __init__(self, map_id, d_lower, d_upper, cb, b2, tables, axes,
                 verdict):
        self.map_id = map_id
        self.d_lower = d_lower
        self.d_certified_upper = d_upper
        self.condition_b_constant = cb
        self.b2_characteristic = b2
        self.tables = tables
        self.axes = axes
        self.verdict = verdict


def theorem1_report(map_id, f, sigma, grid, max_depth, quad=None,
                    d_margin=0.05, decay=0.5, stability=0.75, growth=2.0):
    """Assemble the three-way report for a map and its boundary measure.

    Trends are judged across the depth chain (N/4, N/2, N): the boundary
    constant collapsing below `decay` of its earliest chain value argues
    against contractivity, holding above `stability` argues for it; the
    box characteristic growing by `growth` argues against.
    """
    est = sup_hyperbolic_derivative(f, grid)
    cb_rows = [r for _, r, _ in condition_b_table(sigma, max_depth)]
    b2_rows = [v for _, v in b2_table(sigma, max_depth, quad)]
    chain = sorted({max(1, max_depth // 4), max(1, max_depth // 2),
                    max_depth})
    cb_chain = [min(cb_rows[:n]) for n in chain]
    # the box characteristic is truncation-coupled: growth only shows
    # between runs at different depths, so rerun rather than slice
    b2_chain = [max(v for _, v in b2_table(sigma, n, quad)) for n in chain]

    axes = {}
    if est.certified_upper < 1.0 - d_margin:
        axes["hyperbolic_derivative"] = "contractive"
    elif est.lower > 1.0 - 1e-9:
        axes["hyperbolic_derivative"] = "not"
    else:
        axes["hyperbolic_derivative"] = "inconclusive"

    if cb_chain[-1] <= 0.0 or cb_chain[-1] < decay * cb_chain[0]:
        axes["condition_b"] = "not"
    elif cb_chain[-1] >= stability * cb_chain[0] and cb_chain[-1] > 0.0:
        axes["condition_b"] = "contractive"
    else:
        axes["condition_b"] = "inconclusive"

    if not math.isfinite(b2_chain[-1]) or b2_chain[-1] >= growth * b2_chain[0]:
        axes["b2_characteristic"] = "not"
    elif b2_chain[-1] <= 1.25 * b2_chain[0]:
        axes["b2_characteristic"] = "contractive"
    else:
        axes["b2_characteristic"] = "inconclusive"

    firm = {v for v in axes.values() if v != "inconclusive"}
    if len(firm) > 1:
        verdict = "inconsistent"
    elif not firm:
        verdict = "inconclusive"
    else:
        verdict = "consistent"

    tables = {"chain": chain,
              "condition_b": [float(v) for v in cb_rows],
              "b2": [float(v) for v in b2_rows]}
    return TheoremReport(map_id, est.lower, est.certified_upper,
                         float(cb_chain[-1]), float(b2_chain[-1]),
                         tables, axes, verdict)
