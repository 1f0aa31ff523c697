"""JSON/CSV serialization: round trips, parse errors, atomic writes."""

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from discmaps.disc import Arc
from discmaps.formats import (
    FormatError,
    load_json,
    load_map,
    load_measure,
    map_from_json,
    map_to_json,
    measure_from_json,
    measure_to_json,
    to_jsonable,
    write_csv,
    write_json,
)
from discmaps.maps import Blaschke, Compose, HerglotzMap, Outer, Product
from discmaps.theorems import MeasurableSet

MAP_DOCS = [
    {"kind": "scaled_rotation", "r": 0.7, "theta": 0.12},
    {"kind": "blaschke", "zeros": [[0.3, 0.2], [-0.4, 0.0]],
     "constant": 0.125},
    {"kind": "singular_inner", "atoms": [[0.0, 1.0], [0.5, 0.25]]},
    {"kind": "outer", "cos": [-0.4, 0.2], "sin": [0.1]},
    {"kind": "herglotz",
     "measure": {"kind": "bernoulli", "p": 0.35, "depth": 6},
     "alpha": 0.0, "imaginary_constant": 0.0},
    {"kind": "product", "factors": [
        {"kind": "blaschke", "zeros": [[0.0, 0.0]]},
        {"kind": "scaled_rotation", "r": 0.9, "theta": 0.0}]},
    {"kind": "compose",
     "outer": {"kind": "scaled_rotation", "r": 0.8, "theta": 0.0},
     "inner": {"kind": "blaschke", "zeros": [[0.2, 0.0]]}},
]

MEASURE_DOCS = [
    {"kind": "lebesgue"},
    {"kind": "dirac", "t": 0.3, "mass": 0.5},
    {"kind": "bernoulli", "p": 0.2, "depth": 8},
    {"kind": "bernoulli", "p": 0.35, "depth": 6, "scale": 0.25},
    {"kind": "boundary", "atoms": [[0.1, 0.4]],
     "tree": {"leaves": [0.1, 0.2, 0.1, 0.2]},
     "density": {"c0": 0.5, "cos": [0.2], "sin": []}},
]


class TestMapRoundTrips:
    @pytest.mark.parametrize("doc", MAP_DOCS,
                             ids=[d["kind"] for d in MAP_DOCS])
    def test_values_survive_the_round_trip(self, doc):
        f = map_from_json(doc)
        g = map_from_json(map_to_json(f))
        z = 0.6 * np.exp(2j * np.pi * np.linspace(0, 1, 16, endpoint=False))
        assert np.max(np.abs(f(z) - g(z))) < 1e-12

    def test_bare_real_zeros_accepted(self):
        f = map_from_json({"kind": "blaschke", "zeros": [0.3, -0.2]})
        assert isinstance(f, Blaschke)
        assert f.degree == 2

    def test_unknown_kind_rejected(self):
        with pytest.raises(FormatError):
            map_from_json({"kind": "moebius"})

    def test_missing_field_names_the_context(self):
        with pytest.raises(FormatError, match="zeros"):
            map_from_json({"kind": "blaschke"})


class TestMeasureRoundTrips:
    @pytest.mark.parametrize("doc", MEASURE_DOCS,
                             ids=[d["kind"] + str(i)
                                  for i, d in enumerate(MEASURE_DOCS)])
    def test_masses_survive_the_round_trip(self, doc):
        sigma = measure_from_json(doc)
        again = measure_from_json(measure_to_json(sigma))
        assert again.total_mass == pytest.approx(sigma.total_mass, rel=1e-12)
        for arc in (Arc(0.0, 0.3), Arc(0.4, 0.31), Arc(0.9, 0.2)):
            assert again.arc_mass(arc) == pytest.approx(
                sigma.arc_mass(arc), abs=1e-12)

    def test_bernoulli_scale_applies(self):
        sigma = measure_from_json(
            {"kind": "bernoulli", "p": 0.3, "depth": 4, "scale": 0.125})
        assert sigma.total_mass == pytest.approx(0.125, rel=1e-12)

    def test_zeros_kind_builds_a_closed_disc_measure(self):
        mu = measure_from_json(
            {"kind": "zeros", "zeros": [[0.5, 0.0]],
             "boundary": {"kind": "dirac", "t": 0.0, "mass": 0.25}})
        assert mu.total_mass == pytest.approx(0.75 + 0.25, rel=1e-12)


class TestLoading:
    def test_parse_error_carries_position(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"kind": }')
        with pytest.raises(FormatError, match="line 1"):
            load_json(bad)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError):
            load_map(tmp_path / "absent.json")

    def test_load_map_and_measure(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text(json.dumps(MAP_DOCS[0]))
        load_map(p)
        q = tmp_path / "s.json"
        q.write_text(json.dumps(MEASURE_DOCS[1]))
        load_measure(q)


class TestToJsonable:
    def test_scalars_pass_through(self):
        assert to_jsonable(3) == 3
        assert to_jsonable("x") == "x"
        assert to_jsonable(True) is True
        assert to_jsonable(None) is None

    def test_numpy_and_complex(self):
        assert to_jsonable(np.float64(0.5)) == 0.5
        assert to_jsonable(np.int32(4)) == 4
        assert to_jsonable(0.25 + 0.5j) == [0.25, 0.5]
        assert to_jsonable(np.array([1.0, 2.0])) == [1.0, 2.0]

    def test_fraction_is_exact(self):
        assert to_jsonable(Fraction(13, 4096)) == "13/4096"

    def test_measurable_set(self):
        got = to_jsonable(MeasurableSet([Arc(0.1, 0.2)]))
        assert got["measure"] == pytest.approx(0.2)
        assert got["arcs"][0]["start"] == pytest.approx(0.1)

    def test_nan_and_inf_stay_floats(self):
        assert math.isnan(to_jsonable(float("nan")))
        assert to_jsonable(math.inf) == math.inf


class TestWriting:
    def test_write_json_deterministic(self, tmp_path):
        p = tmp_path / "out.json"
        write_json(p, {"b": 1.5, "a": [1, 2]})
        text = p.read_text()
        assert text.endswith("\n")
        assert text.index('"a"') < text.index('"b"')  # sorted keys
        write_json(p, {"b": 1.5, "a": [1, 2]})
        assert p.read_text() == text

    def test_write_csv_float_repr(self, tmp_path):
        p = tmp_path / "out.csv"
        write_csv(p, ["x", "y"], [(0.1, 2), (1 / 3, 4)])
        lines = p.read_text().splitlines()
        assert lines[0] == "x,y"
        assert lines[1] == "0.1,2"
        assert lines[2].startswith("0.3333333333333333")

    def test_no_stray_temp_files(self, tmp_path):
        p = tmp_path / "out.json"
        write_json(p, {"a": 1})
        write_json(p, {"a": 2})
        assert [q.name for q in tmp_path.iterdir()] == ["out.json"]

    def test_serialization_failure_leaves_no_file(self, tmp_path):
        p = tmp_path / "out.json"
        loop = {}
        loop["self"] = loop
        with pytest.raises(RecursionError):
            write_json(p, loop)
        assert not p.exists()
