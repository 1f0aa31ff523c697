"""Dimension machinery for boundary sets: content enclosures, Frostman
exponents, and Cantor-type constructions driven by Poisson extensions.

Content values are enclosures, never point estimates: the upper bound is a
minimal dyadic cover (dynamic program on the tree), the lower bound comes
from the mass-distribution principle.  The combinatorial layer (the
subcollection thinning and the nested-generation dimension bound) runs on
exact dyadic rationals; Poisson evaluations are the only floating point.
"""

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .disc import Arc, DomainError, DyadicArc, norm_turns, unit
from .measures import MAX_TREE_DEPTH
from .theorems import MeasurableSet, boundary_preimage

__all__ = [
    "hausdorff_content",
    "FrostmanCertificate",
    "frostman_certificate",
    "ArcCollection",
    "FnSelection",
    "fn_subcollection",
    "HungerfordBound",
    "hungerford_bound",
    "quarter_cantor_generations",
    "CantorReport",
    "cantor_builder",
    "radial_traces",
    "FpMonotonicity",
    "fp_monotonicity_check",
]


def _as_set(e):
    if isinstance(e, MeasurableSet):
        return e
    if isinstance(e, DyadicArc):
        return MeasurableSet([e.to_arc()])
    if isinstance(e, Arc):
        return MeasurableSet([e])
    return MeasurableSet(list(e))


# -- Hausdorff content enclosure

def _cover_cost(e, s, budget):
    """Cost of a minimal dyadic cover of e by arcs of depth <= budget."""

    def rec(depth, index):
        length = 2.0 ** -depth
        hit = e.intersection_length(Arc(index * length, length))
        if hit <= 0.0:
            return 0.0
        own = length ** s
        if depth >= budget or hit >= length - 1e-15:
            # splitting a fully covered arc costs 2^(1-s) times more
            return own
        return min(own, rec(depth + 1, 2 * index) + rec(depth + 1, 2 * index + 1))

    return rec(0, 0)


def _mass_lower(e, s):
    """Mass-distribution lower bound using normalized length on e.

    With nu = length restricted to e and normalized, any arc J obeys
    nu(J) <= C |J|^s once C = sup nu(J)/|J|^s, and then the content is at
    least 1/C.  The ratio is extremal on arcs whose endpoints sit at
    segment boundaries (extending across a partially covered segment only
    increases it), so the sup over all arcs reduces to the O(n^2) windows
    spanning whole runs of segments.
    """
    # a wrap-merged segment is listed first with a large start; re-sort
    pairs = sorted((a.start, a.length) for a in e.arcs)
    n = len(pairs)
    starts = [s for s, _ in pairs]
    lens = [ln for _, ln in pairs]
    total = sum(lens)
    if n <= 256:
        best = math.inf
        for i in range(n):
            mass = 0.0
            for j in range(n):
                jj = (i + j) % n
                mass += lens[jj]
                span = starts[jj] + lens[jj] - starts[i] + (1.0 if jj < i else 0.0)
                best = min(best, span ** s * (total / mass))
        return best
    starts = np.asarray(starts)
    lens = np.asarray(lens)
    ends = starts + lens
    cum = np.cumsum(lens)
    best = math.inf
    for i in range(n):
        spans = np.concatenate([ends[i:], ends[:i] + 1.0]) - starts[i]
        masses = np.concatenate([cum[i:], cum[-1] + cum[:i]]) - (cum[i] - lens[i])
        best = min(best, float(np.min(spans ** s * (total / masses))))
    return best


def hausdorff_content(e, s, budget=16):
    """Enclosure (lower, upper) for the s-content of a finite union of arcs.

    The upper bound is the cheapest dyadic cover no deeper than budget; the
    lower bound is the mass-distribution principle for normalized length on
    the set.  Both are rigorous, so lower <= upper always.
    """
    if not 0.0 < s < 1.0:
        raise DomainError("content exponent must lie in (0, 1)")
    if not 0 <= budget <= 48:
        raise DomainError("cover budget must lie in [0, 48]")
    ee = _as_set(e)
    if not ee.arcs:
        return 0.0, 0.0
    upper = _cover_cost(ee, s, budget)
    lower = _mass_lower(ee, s)
    return min(lower, upper), upper


# -- Frostman certificates

def _measure_id(sigma):
    parts = []
    if getattr(sigma, "atom_count", 0):
        parts.append(f"{sigma.atom_count} atoms")
    if getattr(sigma, "tree", None) is not None:
        parts.append(f"tree depth {sigma.tree.depth}")
    if getattr(sigma, "density", None) is not None:
        parts.append(f"degree-{sigma.density.degree} density")
    return " + ".join(parts) if parts else "empty"


@dataclass(frozen=True)
class FrostmanCertificate:
    """Outcome of the dyadic scan for sigma(J) <= C |J|^s.

    `constant` is the smallest C over all scanned arcs and `binding` the
    arc attaining it.  `certified` is False when the deepest level still
    pushes the constant up, the signature of mass concentration; `binding`
    then points at the violating arc.
    """

    exponent: float
    constant: float
    measure_id: str
    scan_depth: int
    certified: bool
    binding: DyadicArc
    per_depth: tuple

    def content_lower(self, mass):
        """Mass-distribution consequence: content of a charged set >= mass/C."""
        return mass / self.constant


def frostman_certificate(sigma, s, max_depth):
    """Scan all dyadic arcs to max_depth for the smallest Frostman constant."""
    if not 0.0 < s < 1.0:
        raise DomainError("Frostman exponent must lie in (0, 1)")
    if not 0 <= max_depth <= MAX_TREE_DEPTH:
        raise DomainError(f"scan depth must lie in [0, {MAX_TREE_DEPTH}]")
    rows = []
    constant = -math.inf
    binding = None
    for n in range(max_depth + 1):
        masses = sigma.dyadic_masses(n)
        kk = int(np.argmax(masses))
        ratio = float(masses[kk]) * 2.0 ** (n * s)
        rows.append(ratio)
        if ratio > constant:
            constant = ratio
            binding = DyadicArc(n, kk)
    certified = len(rows) == 1 or rows[-1] <= max(rows[:-1])
    return FrostmanCertificate(float(s), constant, _measure_id(sigma),
                               max_depth, certified, binding, tuple(rows))


# -- exact arc combinatorics

class ArcCollection:
    """Pairwise disjoint dyadic arcs sorted by position; one generation."""

    __slots__ = ("arcs", "generation")

    def __init__(self, arcs, generation=None):
        arcs = tuple(arcs)
        for a in arcs:
            if not isinstance(a, DyadicArc):
                raise DomainError("arc collections hold DyadicArc members")
        if arcs:
            top = max(a.depth for a in arcs)
            spans = sorted((a.index << (top - a.depth),
                            (a.index + 1) << (top - a.depth)) for a in arcs)
            for (_, e0), (s1, _) in zip(spans, spans[1:]):
                if s1 < e0:
                    raise DomainError("arcs in a collection must be pairwise disjoint")
            arcs = tuple(sorted(arcs, key=lambda a: (a.start, a.depth)))
        self.arcs = arcs
        self.generation = generation

    def __iter__(self):
        return iter(self.arcs)

    def __len__(self):
        return len(self.arcs)

    def __repr__(self):
        tag = "" if self.generation is None else f" gen {self.generation}"
        return f"<ArcCollection{tag}: {len(self.arcs)} arcs>"

    @property
    def total_length(self):
        return sum((Fraction(1, 1 << a.depth) for a in self.arcs), Fraction(0))


class FnSelection(ArcCollection):
    """Thinned subcollection; `cover` holds the stopped arcs that absorbed
    the discarded members, `retained` the exact kept fraction of |I|."""

    __slots__ = ("cover", "retained")

    def __init__(self, kept, cover, retained):
        super().__init__(kept)
        self.cover = tuple(cover)
        self.retained = retained


def fn_subcollection(i, g, c, eta):
    """Thin a family of dyadic subarcs while keeping its length spread out.

    Given pairwise disjoint dyadic arcs inside i carrying at least c|i| of
    length, collect the maximal dyadic arcs J whose share of the family is
    at most (c-eta)|J| (one downward pass with subtree sums) and drop the
    members inside any of them.  The survivors keep at least eta|i| of
    length, and every dyadic arc containing a survivor still holds a
    (c-eta) share of the original family.  Everything is exact: lengths
    are integers at the deepest member scale, thresholds are rationals.
    """
    if not isinstance(i, DyadicArc):
        raise DomainError("the ambient arc must be dyadic")
    members = ArcCollection(g).arcs
    for a in members:
        if not i.contains(a):
            raise DomainError("every member must be a dyadic subarc of the ambient arc")
    c = Fraction(c)
    eta = Fraction(eta)
    if not 0 < eta < c:
        raise DomainError("need 0 < eta < c")
    if not members:
        raise DomainError("the family carries less than c of the ambient length")

    top = max(a.depth for a in members)
    starts = [a.index << (top - a.depth) for a in members]
    pref = [0]
    for a in members:
        pref.append(pref[-1] + (1 << (top - a.depth)))
    total = pref[-1]
    if total * c.denominator * (1 << i.depth) < c.numerator * (1 << top):
        raise DomainError("the family carries less than c of the ambient length")

    q = c - eta
    qn, qd = q.numerator, q.denominator
    cover = []
    node_mass = {}
    dropped = [False] * len(members)

    def rec(depth, index, lo, hi):
        mass = pref[hi] - pref[lo]
        node_mass[(depth, index)] = mass
        if (mass * qd) << depth <= qn << top:
            cover.append((depth, index))
            for j in range(lo, hi):
                dropped[j] = True
            return
        if hi - lo == 1 and members[lo].depth == depth:
            return
        mid = (2 * index + 1) << (top - depth - 1)
        cut = bisect_left(starts, mid, lo, hi)
        rec(depth + 1, 2 * index, lo, cut)
        rec(depth + 1, 2 * index + 1, cut, hi)

    rec(i.depth, i.index, 0, len(members))

    kept = [a for a, gone in zip(members, dropped) if not gone]
    kept_len = sum(1 << (top - a.depth) for a in kept)
    if (kept_len * eta.denominator) << i.depth < eta.numerator << top:
        raise AssertionError("thinning lost more than the guaranteed length")
    seen = set()
    for a in kept:
        d, kk = a.depth, a.index
        while d >= i.depth:
            if (d, kk) not in seen:
                seen.add((d, kk))
                if (node_mass[(d, kk)] * qd) << d < qn << top:
                    raise AssertionError("an arc containing a survivor lost its share")
            if d == 0:
                break
            d -= 1
            kk >>= 1

    retained = Fraction(kept_len << i.depth, 1 << top)
    return FnSelection(kept, [DyadicArc(d, kk) for d, kk in cover], retained)


# -- nested-generation dimension bound

@dataclass(frozen=True)
class HungerfordBound:
    """Dimension lower bound for nested arc generations, with the tightest
    (epsilon, c) pair the data actually realizes."""

    bound: float
    epsilon: float
    c: float
    realized_epsilon: float
    realized_c: float
    realized_bound: float


def hungerford_bound(generations, epsilon, c):
    """1 - log c / log epsilon for nested generations of dyadic arcs.

    Verifies the hypotheses exactly before returning the bound: every
    child arc lies in some parent and is at most epsilon times as long,
    and the children of each parent carry at least c of its length.  A
    violation names the offending pair.
    """
    gens = [g if isinstance(g, ArcCollection) else ArcCollection(g)
            for g in generations]
    if not gens or any(len(g) == 0 for g in gens):
        raise DomainError("every generation must be a nonempty collection")
    eps = Fraction(epsilon)
    cc = Fraction(c)
    if not 0 < eps < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    if not eps <= cc < 1:
        raise DomainError("need epsilon <= c < 1")

    realized_eps = Fraction(0)
    realized_c = None
    for gnum in range(len(gens) - 1):
        parents = gens[gnum].arcs
        children = gens[gnum + 1].arcs
        lookup = {(a.depth, a.index): a for a in parents}
        min_depth = min(a.depth for a in parents)
        sums = {}
        for ch in children:
            d, kk = ch.depth, ch.index
            parent = None
            while d >= min_depth:
                parent = lookup.get((d, kk))
                if parent is not None or d == 0:
                    break
                d -= 1
                kk >>= 1
            if parent is None:
                raise DomainError(
                    f"generation-{gnum + 1} arc (depth {ch.depth}, index {ch.index}) "
                    f"lies in no generation-{gnum} arc")
            ratio = Fraction(1, 1 << (ch.depth - parent.depth))
            if ratio > eps:
                raise DomainError(
                    f"generation-{gnum + 1} arc (depth {ch.depth}, index {ch.index}) "
                    f"is longer than epsilon times its parent "
                    f"(depth {parent.depth}, index {parent.index})")
            realized_eps = max(realized_eps, ratio)
            key = (parent.depth, parent.index)
            sums[key] = sums.get(key, Fraction(0)) + Fraction(1, 1 << ch.depth)
        for a in parents:
            share = sums.get((a.depth, a.index), Fraction(0)) * (1 << a.depth)
            if share < cc:
                raise DomainError(
                    f"children of generation-{gnum} arc (depth {a.depth}, "
                    f"index {a.index}) carry {float(share):.6g} of its length, below c")
            realized_c = share if realized_c is None else min(realized_c, share)

    bound = 1.0 - math.log2(float(cc)) / math.log2(float(eps))
    if realized_c is None:
        r_eps = r_c = r_bound = math.nan
    else:
        r_eps = float(realized_eps)
        r_c = float(realized_c)
        r_bound = 1.0 - math.log2(r_c) / math.log2(r_eps)
    return HungerfordBound(bound, float(eps), float(cc), r_eps, r_c, r_bound)


def quarter_cantor_generations(count):
    """Keep the first and last quarter of every arc, count times over."""
    if not 1 <= count <= 25:
        raise DomainError("generation count must lie in [1, 25]")
    gens = [ArcCollection([DyadicArc(0, 0)], generation=0)]
    for gnum in range(1, count + 1):
        nxt = []
        for a in gens[-1].arcs:
            nxt.append(DyadicArc(a.depth + 2, 4 * a.index))
            nxt.append(DyadicArc(a.depth + 2, 4 * a.index + 3))
        gens.append(ArcCollection(nxt, generation=gnum))
    return gens


# -- stopping-time Cantor construction

@dataclass
class CantorReport:
    """Everything the stopping-time construction produced or refused to."""

    k: float
    k1: float
    eta: object
    max_depth: int
    beam: int
    generations: tuple = ()
    seed: object = None
    seed_poisson: float = math.nan
    realized_epsilon: float = math.nan
    realized_c: float = math.nan
    dimension_bound: float = math.nan
    hungerford: object = None
    witnesses: tuple = ()
    stopping_counts: tuple = ()
    relay_coverage: tuple = ()
    truncated: bool = False
    degenerate: bool = False
    failed: bool = False
    reason: object = None

    @property
    def ok(self):
        return not (self.failed or self.degenerate)


def _arc_inside(arc, window):
    if window.length >= 1.0 - 1e-15:
        return True
    off = norm_turns(arc.start - window.start)
    return off + arc.length <= window.length + 1e-12


def _arc_intersects(arc, window):
    if window.length >= 1.0 - 1e-15 or arc.length >= 1.0 - 1e-15:
        return True
    off = norm_turns(arc.start - window.start)
    return off < window.length or off + arc.length > 1.0


def cantor_builder(mu, i0=None, k=1.0 / 16, k1=None, eta=None, generations=1,
                   max_depth=20, beam=256):
    """Stopping-time Cantor construction on the Poisson extension of mu.

    Generation zero is a dyadic seed arc whose anchor value sits in
    [k1/2, k1] (searched inside i0, or verified if i0 is itself dyadic).
    Each round finds the maximal dyadic subarcs whose anchor value reaches
    k, thins them with fn_subcollection, and declares the survivors the
    next generation; deeper rounds restart from the maximal subarcs where
    the value has fallen back below k1.  Searches are beam-limited per
    level (flagged in `truncated` when the beam overflows), and the
    realized length and mass ratios are measured, never assumed: the
    report re-verifies them through hungerford_bound.
    """
    if k1 is None:
        k1 = k / 100.0
    if not (0.0 < k1 < k / 10.0 and k < 0.1):
        raise DomainError("thresholds must satisfy 0 < k1 < k/10 and k < 1/10")
    if generations < 1:
        raise DomainError("need at least one generation")
    if not 1 <= max_depth <= MAX_TREE_DEPTH:
        raise DomainError(f"max_depth must lie in [1, {MAX_TREE_DEPTH}]")
    if beam < 2:
        raise DomainError("beam width must be at least 2")
    base = dict(k=float(k), k1=float(k1), eta=eta, max_depth=max_depth, beam=beam)

    cache = {}

    def pois(nodes):
        missing = [a for a in nodes if a not in cache]
        if missing:
            pts = np.array([a.anchor for a in missing], dtype=complex)
            vals = np.atleast_1d(np.asarray(mu.poisson(pts), dtype=float))
            cache.update(zip(missing, vals.tolist()))
        return [cache[a] for a in nodes]

    probe = [DyadicArc(1, 0), DyadicArc(1, 1)] + [DyadicArc(2, j) for j in range(4)]
    vals = pois(probe)
    if max(vals) - min(vals) <= 1e-10 * max(1.0, max(vals)):
        return CantorReport(degenerate=True,
                            reason="Poisson extension is constant at the probe "
                                   "scale; no stopping structure exists", **base)

    # generation zero
    if isinstance(i0, DyadicArc):
        seed_val = pois([i0])[0]
        if not k1 / 2.0 <= seed_val <= k1:
            raise DomainError(
                f"seed arc misses the bracket [k1/2, k1]: P = {seed_val:.6g}")
        seed = i0
    else:
        window = Arc(0.0, 1.0) if i0 is None else i0
        seed = None
        seed_val = math.nan
        level = [DyadicArc(0, 0)]
        for _ in range(max_depth + 1):
            if not level:
                break
            level_vals = pois(level)
            hits = [(a, v) for a, v in zip(level, level_vals)
                    if _arc_inside(a, window) and k1 / 2.0 <= v <= k1]
            if hits:
                seed, seed_val = min(hits, key=lambda av: av[0].index)
                break
            live = [(v, a) for a, v in zip(level, level_vals)
                    if a.depth < max_depth and _arc_intersects(a, window)
                    and (v > k1 or not _arc_inside(a, window))]
            live.sort(key=lambda va: (va[0], va[1].index))
            level = [child for _, a in live[:beam] for child in a.children()]
        if seed is None:
            raise DomainError("no seed arc found at this resolution: the "
                              "bracket [k1/2, k1] was never hit")

    truncated = [False]

    def sweep(a, hit, keep_key):
        """Maximal dyadic subarcs of a where hit(value) first fires."""
        if a.depth >= max_depth:
            return []
        found = []
        level = list(a.children())
        while level:
            level_vals = pois(level)
            live = []
            for node, v in zip(level, level_vals):
                if hit(v):
                    found.append(node)
                elif node.depth < max_depth:
                    live.append((v, node))
            live.sort(key=lambda vn: (keep_key(vn[0]), vn[1].index))
            if len(live) > beam:
                truncated[0] = True
            level = [child for _, n in live[:beam] for child in n.children()]
        return found

    def expand(relay):
        """Stopping arcs inside one relay seed, thinned; None when the
        branch dies, with the reason."""
        stop = sweep(relay, lambda v: v >= k, lambda v: -v)
        if not stop:
            return None, None, 0
        c_real = sum((Fraction(1, 1 << a.depth) for a in stop),
                     Fraction(0)) * (1 << relay.depth)
        if c_real == 1:
            return None, "the stopping family exhausts a seed arc", len(stop)
        eta_use = Fraction(eta) if eta is not None else c_real / 2
        if not 0 < eta_use < c_real:
            return None, (f"eta = {float(eta_use):.4g} falls outside the realized "
                          f"stopping fraction (0, {float(c_real):.4g})"), len(stop)
        sel = fn_subcollection(relay, stop, c_real, eta_use)
        return list(sel.arcs), None, len(stop)

    gens = [ArcCollection([seed], generation=0)]
    links = []
    stopping_counts = []
    relay_coverage = []
    failed_reason = None
    for gnum in range(1, generations + 1):
        link = {}
        count = 0
        relay_count = 0
        cov_min = None
        for parent in gens[-1].arcs:
            if gnum == 1:
                relays = [parent]
                cov = Fraction(1)
            else:
                relays = sweep(parent, lambda v: v <= k1, lambda v: v)
                cov = sum((Fraction(1, 1 << a.depth) for a in relays),
                          Fraction(0)) * (1 << parent.depth)
            relay_count += len(relays)
            cov_min = cov if cov_min is None else min(cov_min, cov)
            kids = []
            for relay in relays:
                arcs, err, raw = expand(relay)
                count += raw
                if err is not None:
                    failed_reason = err
                    break
                if arcs:
                    kids.extend(arcs)
            if failed_reason:
                break
            if kids:
                link[parent] = kids
        if failed_reason:
            break
        stopping_counts.append(count)
        relay_coverage.append(float(cov_min) if cov_min is not None else math.nan)
        if not link:
            failed_reason = ("no stopping arcs appear under the depth cap"
                             if relay_count else
                             "the field never falls back below k1 under the "
                             "depth cap, so no round-restart arcs exist")
            break
        links.append(link)
        gens.append(ArcCollection([a for kids in link.values() for a in kids],
                                  generation=gnum))

    if failed_reason is None:
        # drop branches that died later on, deepest transition first
        valid = set(gens[-1].arcs)
        for t in range(len(links) - 1, -1, -1):
            links[t] = {p: [a for a in kids if a in valid]
                        for p, kids in links[t].items()}
            links[t] = {p: kids for p, kids in links[t].items() if kids}
            valid = set(links[t].keys())
            gens[t] = ArcCollection(valid, generation=t)
            if not valid:
                failed_reason = "every branch of the construction died"
                break

    partial = dict(generations=tuple(gens), seed=seed,
                   seed_poisson=float(seed_val),
                   stopping_counts=tuple(stopping_counts),
                   relay_coverage=tuple(relay_coverage),
                   truncated=truncated[0], **base)
    if failed_reason is not None:
        return CantorReport(failed=True, reason=failed_reason, **partial)

    eps_hat = Fraction(0)
    c_hat = None
    for link in links:
        for parent, kids in link.items():
            share = Fraction(0)
            for a in kids:
                eps_hat = max(eps_hat, Fraction(1, 1 << (a.depth - parent.depth)))
                share += Fraction(1, 1 << (a.depth - parent.depth))
            c_hat = share if c_hat is None else min(c_hat, share)
    if c_hat < eps_hat:
        return CantorReport(failed=True,
                            reason="realized mass fraction falls below the "
                                   "realized length ratio; the bound is vacuous",
                            realized_epsilon=float(eps_hat),
                            realized_c=float(c_hat), **partial)

    hb = hungerford_bound(gens, eps_hat, c_hat)
    final = gens[-1].arcs
    step = max(1, len(final) // 32)
    witnesses = tuple(float(a.to_arc().center) for a in final[::step][:32])
    return CantorReport(realized_epsilon=float(eps_hat), realized_c=float(c_hat),
                        dimension_bound=hb.bound, hungerford=hb,
                        witnesses=witnesses, **partial)


def radial_traces(f, angles, j_range=(4, 12)):
    """Rows (angle, radius, |f|) along the rays to angles, r = 1 - 2^-j.

    A finite trace stands in for the radial limsup; the truncation to
    j_range is deliberate and should be reported next to the values.
    """
    lo, hi = j_range
    rows = []
    for t in angles:
        xi = unit(t)
        for j in range(lo, hi + 1):
            r = 1.0 - 2.0 ** -j
            rows.append((float(t), r, abs(f(r * xi))))
    return rows


# -- preimage monotonicity

@dataclass(frozen=True)
class FpMonotonicity:
    """Content enclosures for a boundary set and its full preimage."""

    preimage_lower: float
    image_upper: float
    ratio: float


def fp_monotonicity_check(f, e, s, budget=14):
    """Lower content of the preimage against upper content of the set."""
    ee = _as_set(e)
    if not ee.arcs:
        raise DomainError("the target set must charge at least one arc")
    pre = boundary_preimage(f, ee)
    lower = hausdorff_content(pre, s, budget)[0]
    upper = hausdorff_content(ee, s, budget)[1]
    return FpMonotonicity(lower, upper, lower / upper)
