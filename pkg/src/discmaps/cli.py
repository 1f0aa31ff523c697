"""Command-line front end: eight batch commands, JSON/CSV artifacts.

Exit status: 0 on success (numerical degeneracies are flagged inside the
report, not fatal), 1 when a cross-theorem report reaches the verdict
"inconsistent", 2 on input errors (bad flags, missing or malformed files).
"""

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .clark import clark_blaschke, clark_radial
from .dimension import (cantor_builder, frostman_certificate,
                        hausdorff_content, radial_traces)
from .disc import Arc, DomainError
from .formats import (FormatError, load_map, load_measure, to_jsonable,
                      write_csv, write_json)
from .maps import (Blaschke, HerglotzMap, HyperbolicGridSpec,
                   sup_hyperbolic_derivative)
from .measures import (b2_characteristic, b2_table,
                       bernoulli_alternating_measure, condition_b_constant,
                       condition_b_table, doubling_constant, symmetry_defect)
from .theorems import (MeasurableSet, essential_norm_estimate, lemma3_checks,
                       mixing_report, theorem1_report, theorem2_scan,
                       zeros_measure)

__all__ = ["RunConfig", "run", "main", "COMMANDS"]

COMMANDS = ("dh", "clark", "b2", "mixing", "zeros", "cantor", "content",
            "report")

MAX_DEPTH_FLAG = 24
MAX_GRID_FLAG = 16


@dataclass(frozen=True)
class RunConfig:
    """Validated flag set for one command invocation."""

    command: str
    map_path: str = None
    measure_path: str = None
    depth: int = None
    grid_j: int = None
    p: float = None
    alpha: float = 0.0
    out_dir: str = "."
    seed: int = 0
    tol: float = 1e-9
    threads: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise FormatError(f"unknown command '{self.command}'")
        if self.depth is not None and not 1 <= self.depth <= MAX_DEPTH_FLAG:
            raise FormatError(f"--depth must lie in [1, {MAX_DEPTH_FLAG}]")
        if self.grid_j is not None and not 1 <= self.grid_j <= MAX_GRID_FLAG:
            raise FormatError(f"--grid must lie in [1, {MAX_GRID_FLAG}]")
        if self.seed < 0:
            raise FormatError("--seed must be nonnegative")
        if not self.tol > 0.0:
            raise FormatError("--tol must be positive")


def _meta(config):
    return {"command": config.command, "seed": config.seed,
            "tol": config.tol, "depth": config.depth,
            "grid": config.grid_j, "alpha": config.alpha,
            "threads": config.threads}


def _need_map(config):
    if config.map_path is None:
        raise FormatError(f"'{config.command}' needs --map FILE")
    return load_map(config.map_path)


def _need_measure(config, default_depth=12):
    if config.measure_path is not None:
        return load_measure(config.measure_path)
    if config.p is not None:
        return bernoulli_alternating_measure(
            config.p, config.depth if config.depth is not None
            else default_depth)
    raise FormatError(f"'{config.command}' needs --measure FILE or --p VALUE")


def _out(config, name):
    return os.path.join(config.out_dir, name)


def _map_id(config):
    if config.map_path is not None:
        return os.path.splitext(os.path.basename(config.map_path))[0]
    return config.command


# -- commands

def _cmd_dh(config):
    f = _need_map(config)
    grid = HyperbolicGridSpec(config.grid_j or 6)
    est = sup_hyperbolic_derivative(f, grid)
    levels = [0.25, 0.5, 0.75, 0.9]
    ess = essential_norm_estimate(f, levels, grid)
    write_json(_out(config, "dh.json"),
               {"meta": _meta(config), "sup": est,
                "essential_norm": [{"c": c, "estimate": v, "nodes": n}
                                   for c, v, n in ess]})
    write_csv(_out(config, "dh.csv"), ["c", "estimate", "nodes"], ess)
    print(f"dh: lower={est.lower:.12g} certified_upper="
          f"{est.certified_upper:.12g} mesh={est.mesh:.6g}")
    return 0


def _cmd_clark(config):
    f = _need_map(config)
    if isinstance(f, Blaschke):
        rng = np.random.default_rng(config.seed)
        sp = clark_blaschke(f, config.alpha, rng=rng)
        write_json(_out(config, "clark.json"),
                   {"meta": _meta(config), "spectrum": sp})
        write_csv(_out(config, "clark.csv"), ["t", "mass"], sp.atoms)
        print(f"clark: {len(sp.atoms)} atoms, total mass "
              f"{sp.total_mass:.12g}, residual {sp.validation_residual:.3g}")
        return 0
    radius = 1.0 - 2.0 ** -(config.depth or 8)
    cr = clark_radial(f, config.alpha, radius)
    write_json(_out(config, "clark.json"),
               {"meta": _meta(config), "radial": cr, "radius": radius})
    print(f"clark: radial profile at r={radius}")
    return 0


def _cmd_b2(config):
    mu = _need_measure(config)
    n = config.depth or 12
    cb_rows = condition_b_table(mu, n)
    b2_rows = b2_table(mu, n)
    artifact = {"meta": _meta(config),
                "condition_b_constant": condition_b_constant(mu, n),
                "b2_characteristic": b2_characteristic(mu, n),
                "doubling_constant": doubling_constant(mu, n),
                "symmetry_defect": symmetry_defect(mu, n),
                "condition_b_table": [{"depth": d, "value": v}
                                      for d, v, _ in cb_rows],
                "b2_table": [{"depth": d, "value": v} for d, v in b2_rows]}
    write_json(_out(config, "b2.json"), artifact)
    write_csv(_out(config, "b2.csv"), ["depth", "condition_b", "b2"],
              [(d, v, w) for (d, v, _), (_, w) in zip(cb_rows, b2_rows)])
    print(f"b2: condition_b={artifact['condition_b_constant']:.6g} "
          f"characteristic={artifact['b2_characteristic']:.6g} depth={n}")
    return 0


def _cmd_mixing(config):
    f = _need_map(config)
    rng = np.random.default_rng(config.seed)
    arcs, sets = [], []
    for _ in range(20):
        arcs.append(Arc(rng.uniform(0.0, 1.0), rng.uniform(0.05, 0.3)))
        pieces = [Arc(rng.uniform(0.0, 1.0), rng.uniform(0.05, 0.25))
                  for _ in range(int(rng.integers(1, 3)))]
        sets.append(MeasurableSet(pieces))
    rep = mixing_report(f, arcs, sets)
    write_json(_out(config, "mixing.json"),
               {"meta": _meta(config), "report": rep})
    write_csv(_out(config, "mixing.csv"),
              ["arc_start", "arc_length", "set_measure", "density",
               "harmonic", "ratio"],
              [(r["arc"].start, r["arc"].length, r["set"].measure,
                r["density"], r["harmonic"], r["ratio"]) for r in rep.rows])
    print(f"mixing: lower={rep.lower_constant:.6g} "
          f"upper={rep.upper_constant:.6g} rows={len(rep.rows)}")
    return 0


def _cmd_zeros(config):
    f = _need_map(config)
    mu = zeros_measure(f)
    rng = np.random.default_rng(config.seed)
    r = 1.0 - 2.0 ** -rng.uniform(1.0, 8.0, 50)
    pts = r * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, 50))
    l3 = lemma3_checks(f, pts)
    scan = theorem2_scan(mu, [0.25, 0.5, 0.75, 1.0], config.depth or 8)
    write_json(_out(config, "zeros.json"),
               {"meta": _meta(config),
                "measure": {"total_mass": mu.total_mass,
                            "zeros": list(mu.zeros)},
                "lemma3": l3, "scan": scan})
    print(f"zeros: total_mass={mu.total_mass:.6g} "
          f"boxes_scanned={scan.boxes_scanned}")
    return 0


def _cmd_cantor(config):
    mu = _need_measure(config, default_depth=14)
    # the library default k1 = k/100 needs ~17 levels of Poisson growth,
    # more than the depth cap allows; the command defaults to a ratio
    # that fits and lets --p override the lower threshold
    k = 1.0 / 16
    k1 = config.p if (config.p is not None and
                      config.measure_path is not None) else k / 12.0
    rep = cantor_builder(mu, k=k, k1=k1, max_depth=config.depth or 20)
    artifact = {"meta": _meta(config), "report": rep,
                "generations": [{"generation": g.generation,
                                 "arcs": [{"depth": a.depth, "index": a.index}
                                          for a in g.arcs]}
                                for g in rep.generations]}
    write_json(_out(config, "cantor.json"), artifact)
    if config.map_path is not None and rep.witnesses:
        f = load_map(config.map_path)
        write_csv(_out(config, "cantor_traces.csv"), ["t", "r", "abs_f"],
                  radial_traces(f, rep.witnesses))
    if rep.degenerate or rep.failed:
        print(f"cantor: no construction ({rep.reason})")
    else:
        print(f"cantor: {len(rep.generations)} generations, "
              f"dimension bound {rep.dimension_bound:.6g}")
    return 0


def _cmd_content(config):
    mu = _need_measure(config)
    s = config.p if config.p is not None and config.measure_path is not None \
        else 0.5
    if not 0.0 < s < 1.0:
        raise FormatError("content exponent (--p) must lie in (0, 1)")
    n = config.depth or 12
    cert = frostman_certificate(mu, s, n)
    level = min(n, 8)
    masses = mu.dyadic_masses(level)
    mean = mu.total_mass / (1 << level)
    heavy = [k for k in range(1 << level) if masses[k] >= mean][:64]
    e = MeasurableSet([Arc(k / (1 << level), 1.0 / (1 << level))
                       for k in heavy])
    lower, upper = hausdorff_content(e, s, budget=min(n + 2, 16))
    charged = float(sum(masses[k] for k in heavy))
    floor = cert.content_lower(charged)
    write_json(_out(config, "content.json"),
               {"meta": _meta(config), "certificate": cert,
                "charged_set": e, "charged_mass": charged,
                "enclosure": {"lower": lower, "upper": upper},
                "mass_distribution_floor": floor,
                "consistent": bool(lower >= floor - config.tol)})
    print(f"content: C={cert.constant:.6g} certified={cert.certified} "
          f"enclosure=[{lower:.6g}, {upper:.6g}]")
    return 0


def _cmd_report(config):
    f = _need_map(config)
    if config.measure_path is not None:
        sigma = load_measure(config.measure_path)
    elif isinstance(f, Blaschke):
        sigma = clark_blaschke(f, config.alpha).measure()
    elif isinstance(f, HerglotzMap):
        sigma = f.measure
    else:
        raise FormatError("'report' needs --measure for this map kind")
    grid = HyperbolicGridSpec(config.grid_j or 6)
    rep = theorem1_report(_map_id(config), f, sigma, grid,
                          config.depth or 10)
    label = rep.verdict
    if rep.verdict == "consistent":
        firm = {v for v in rep.axes.values() if v != "inconclusive"}
        label += "-contractive" if firm == {"contractive"} else "-noncontractive"
    write_json(_out(config, "report.json"),
               {"meta": _meta(config), "report": rep, "verdict": label})
    print(f"report: {label} (D in [{rep.d_lower:.6g}, "
          f"{rep.d_certified_upper:.6g}], condition_b="
          f"{rep.condition_b_constant:.6g})")
    return 1 if rep.verdict == "inconsistent" else 0


_DISPATCH = {"dh": _cmd_dh, "clark": _cmd_clark, "b2": _cmd_b2,
             "mixing": _cmd_mixing, "zeros": _cmd_zeros,
             "cantor": _cmd_cantor, "content": _cmd_content,
             "report": _cmd_report}


def run(command, config):
    """Execute one command; returns the process exit status."""
    if command != config.command:
        raise FormatError("command does not match the config")
    try:
        return _DISPATCH[command](config)
    except (FormatError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="discmaps",
        description="batch reports for holomorphic self-maps of the disc")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--map", dest="map_path", metavar="FILE")
    parser.add_argument("--measure", dest="measure_path", metavar="FILE")
    parser.add_argument("--depth", type=int, metavar="N")
    parser.add_argument("--grid", dest="grid_j", type=int, metavar="J")
    parser.add_argument("--p", type=float, metavar="VALUE")
    parser.add_argument("--alpha", type=float, default=0.0, metavar="TURNS")
    parser.add_argument("--out", dest="out_dir", default=".", metavar="DIR")
    parser.add_argument("--seed", type=int, default=0, metavar="N")
    parser.add_argument("--tol", type=float, default=1e-9, metavar="EPS")
    args = parser.parse_args(argv)
    threads = os.environ.get("DISCMAPS_THREADS", "1")
    try:
        config = RunConfig(command=args.command, map_path=args.map_path,
                           measure_path=args.measure_path, depth=args.depth,
                           grid_j=args.grid_j, p=args.p, alpha=args.alpha,
                           out_dir=args.out_dir, seed=args.seed, tol=args.tol,
                           threads=max(1, int(threads)))
    except (FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(args.command, config)


if __name__ == "__main__":
    sys.exit(main())
