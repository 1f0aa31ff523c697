"""JSON and CSV interchange for maps, measures, and report objects.

Schemas are documented in docs/formats.md.  Serialization is
deterministic: keys are sorted, floats use shortest-roundtrip repr, and
files are written atomically (temp file + rename) so a crashed run never
leaves a half-written artifact.
"""

import csv
import io
import json
import os
import tempfile
from dataclasses import fields, is_dataclass
from fractions import Fraction

import numpy as np

from .disc import Arc, DomainError, DyadicArc
from .maps import (Blaschke, Compose, HerglotzMap, Outer, Product,
                   ScaledRotation, SingularInnerAtoms)
from .measures import (BoundaryMeasure, DyadicMassTree, TrigDensity,
                       ZerosMeasure, bernoulli_alternating_measure, dirac,
                       lebesgue)
from .theorems import MeasurableSet

__all__ = [
    "FormatError",
    "load_json",
    "map_from_json",
    "map_to_json",
    "load_map",
    "measure_from_json",
    "measure_to_json",
    "load_measure",
    "to_jsonable",
    "write_json",
    "write_csv",
]


class FormatError(DomainError):
    """Malformed input artifact; the message carries file/line context."""


def load_json(path):
    """Parse a JSON file, reporting the offending line on failure."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(
            f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _require(obj, key, context):
    if key not in obj:
        raise FormatError(f"{context}: missing required key '{key}'")
    return obj[key]


def _complex_pairs(entries, context):
    out = []
    for e in entries:
        if isinstance(e, (int, float)):
            out.append(complex(e))
        elif isinstance(e, (list, tuple)) and len(e) == 2:
            out.append(complex(float(e[0]), float(e[1])))
        else:
            raise FormatError(f"{context}: expected a number or [re, im] pair")
    return out


# -- measures

def measure_from_json(obj, context="measure"):
    if not isinstance(obj, dict):
        raise FormatError(f"{context}: expected an object")
    kind = obj.get("kind", "boundary")
    if kind == "lebesgue":
        return lebesgue()
    if kind == "dirac":
        return dirac(float(_require(obj, "t", context)),
                     float(obj.get("mass", 1.0)))
    if kind == "bernoulli":
        mu = bernoulli_alternating_measure(
            float(_require(obj, "p", context)),
            int(_require(obj, "depth", context)))
        scale = float(obj.get("scale", 1.0))
        if scale <= 0.0:
            raise FormatError(f"{context}: scale must be positive")
        if scale != 1.0:
            leaves = mu.tree.masses_at_depth(mu.tree.depth)
            mu = BoundaryMeasure.from_tree(scale * leaves)
        return mu
    if kind == "boundary":
        atoms = tuple((float(t), float(m)) for t, m in obj.get("atoms", ()))
        tree = obj.get("tree")
        if tree is not None:
            tree = np.asarray([float(v) for v in _require(tree, "leaves",
                                                          context + ".tree")])
        dens = obj.get("density")
        if dens is not None:
            dens = TrigDensity(float(_require(dens, "c0", context + ".density")),
                               [float(c) for c in dens.get("cos", ())],
                               [float(s) for s in dens.get("sin", ())])
        if not atoms and tree is None and dens is None:
            raise FormatError(f"{context}: boundary measure needs atoms, "
                              f"a tree, or a density")
        return BoundaryMeasure(atoms=atoms,
                               tree=None if tree is None else DyadicMassTree(tree),
                               density=dens)
    if kind == "zeros":
        boundary = obj.get("boundary")
        if boundary is not None:
            boundary = measure_from_json(boundary, context + ".boundary")
        return ZerosMeasure(
            zeros=_complex_pairs(obj.get("zeros", ()), context + ".zeros"),
            boundary=boundary)
    raise FormatError(f"{context}: unknown measure kind '{kind}'")


def measure_to_json(sigma):
    if isinstance(sigma, ZerosMeasure):
        out = {"kind": "zeros",
               "zeros": [[z.real, z.imag] for z in sigma.zeros]}
        if sigma.boundary is not None:
            out["boundary"] = measure_to_json(sigma.boundary)
        return out
    if not isinstance(sigma, BoundaryMeasure):
        raise FormatError(f"cannot serialize measure of type "
                          f"{type(sigma).__name__}")
    out = {"kind": "boundary"}
    if sigma.atom_count:
        out["atoms"] = [[float(t), float(m)] for t, m in
                        zip(sigma.atom_angles, sigma.atom_masses)]
    if sigma.tree is not None:
        out["tree"] = {"depth": sigma.tree.depth,
                       "leaves": [float(v) for v in
                                  sigma.tree.masses_at_depth(sigma.tree.depth)]}
    if sigma.density is not None:
        d = sigma.density
        out["density"] = {"c0": d.c0, "cos": list(d.cos_coeffs),
                          "sin": list(d.sin_coeffs)}
    return out


def load_measure(path):
    return measure_from_json(load_json(path), context=str(path))


# -- maps

def map_from_json(obj, context="map"):
    if not isinstance(obj, dict):
        raise FormatError(f"{context}: expected an object")
    kind = _require(obj, "kind", context)
    if kind == "scaled_rotation":
        return ScaledRotation(float(_require(obj, "r", context)),
                              float(obj.get("theta", 0.0)))
    if kind == "blaschke":
        return Blaschke(_complex_pairs(_require(obj, "zeros", context),
                                       context + ".zeros"),
                        float(obj.get("constant", 0.0)))
    if kind == "singular_inner":
        return SingularInnerAtoms([(float(t), float(m))
                                   for t, m in _require(obj, "atoms", context)])
    if kind == "outer":
        return Outer([float(c) for c in _require(obj, "cos", context)],
                     [float(s) for s in obj.get("sin", ())])
    if kind == "herglotz":
        return HerglotzMap(
            measure_from_json(_require(obj, "measure", context),
                              context + ".measure"),
            float(obj.get("alpha", 0.0)),
            float(obj.get("imaginary_constant", 0.0)))
    if kind == "product":
        return Product([map_from_json(o, f"{context}.factors[{k}]")
                        for k, o in enumerate(_require(obj, "factors", context))])
    if kind == "compose":
        return Compose(map_from_json(_require(obj, "outer", context),
                                     context + ".outer"),
                       map_from_json(_require(obj, "inner", context),
                                     context + ".inner"))
    raise FormatError(f"{context}: unknown map kind '{kind}'")


def map_to_json(f):
    if isinstance(f, ScaledRotation):
        return {"kind": "scaled_rotation", "r": f.r, "theta": f.theta}
    if isinstance(f, Blaschke):
        return {"kind": "blaschke",
                "zeros": [[z.real, z.imag] for z in f.zeros],
                "constant": f.constant}
    if isinstance(f, SingularInnerAtoms):
        return {"kind": "singular_inner", "atoms": [[t, m] for t, m in f.atoms]}
    if isinstance(f, Outer):
        neg = f.log_modulus_density()
        return {"kind": "outer",
                "cos": [-neg.c0] + [-c for c in neg.cos_coeffs],
                "sin": [-s for s in neg.sin_coeffs]}
    if isinstance(f, HerglotzMap):
        return {"kind": "herglotz", "measure": measure_to_json(f.measure),
                "alpha": f.alpha, "imaginary_constant": f.imaginary_constant}
    if isinstance(f, Product):
        return {"kind": "product", "factors": [map_to_json(g) for g in f.factors]}
    if isinstance(f, Compose):
        return {"kind": "compose", "outer": map_to_json(f.outer),
                "inner": map_to_json(f.inner)}
    raise FormatError(f"cannot serialize map of type {type(f).__name__}")


def load_map(path):
    return map_from_json(load_json(path), context=str(path))


# -- generic report serialization

def to_jsonable(obj):
    """Recursively convert report objects to JSON-ready structures.

    Complex numbers become [re, im] pairs, exact rationals become
    "num/den" strings so no precision is lost, arcs become their
    defining fields.
    """
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, MeasurableSet):
        return {"arcs": [to_jsonable(a) for a in obj.arcs],
                "measure": obj.measure}
    if is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name))
                for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    slots = getattr(type(obj), "__slots__", None)
    if slots is not None:
        return {name: to_jsonable(getattr(obj, name)) for name in slots}
    if hasattr(obj, "__dict__"):
        return {k: to_jsonable(v) for k, v in vars(obj).items()
                if not k.startswith("_")}
    return str(obj)


def _atomic_write(path, data):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj):
    """Serialize to sorted-key JSON, atomically."""
    _atomic_write(path, json.dumps(to_jsonable(obj), sort_keys=True,
                                   indent=2) + "\n")


def write_csv(path, header, rows):
    """Write a CSV table atomically with unix newlines."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    _atomic_write(path, buf.getvalue())
