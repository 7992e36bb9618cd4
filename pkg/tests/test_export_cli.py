"""Serialization roundtrips, drawing output, and the CLI surface."""

import json
import os

import pytest

from rigidlab.bq import gadget
from rigidlab.cli import main
from rigidlab.export import (
    dumps_canonical,
    load_json,
    orientation_from_json,
    orientation_to_dot,
    orientation_to_json,
    pointset_from_json,
    pointset_to_json,
    pointset_to_svg,
    product_to_json,
    relstruct_from_json,
    relstruct_to_dot,
    relstruct_to_json,
    save_json,
    unitgraph_to_dot,
    write_text_atomic,
)
from rigidlab.numeric import Point, QScalar
from rigidlab.phi import orientation_from_bits
from rigidlab.plane import base_triangle, lattice_ball, lattice_point
from rigidlab.product import build_product
from rigidlab.relations import RelStruct


class TestJsonRoundtrip:
    def test_pointset_exact(self):
        ps = lattice_ball(1)
        doc = pointset_to_json(ps)
        assert doc["schema"] == "rigidlab.pointset/1"
        back = pointset_from_json(doc)
        assert back == ps

    def test_pointset_float(self):
        ps = lattice_ball(1).to_float()
        back = pointset_from_json(pointset_to_json(ps))
        assert back == ps

    def test_relstruct(self):
        s = RelStruct(3, ((0, 1), (2, 0)), ("a", "b", "c"))
        back = relstruct_from_json(relstruct_to_json(s))
        assert back == s

    def test_orientation(self):
        ps = lattice_ball(1)
        o = orientation_from_bits(ps, 137)
        back = orientation_from_json(orientation_to_json(o))
        assert back.pairs == o.pairs
        assert back.base == o.base

    def test_schema_mismatch(self):
        from rigidlab.errors import UsageError
        with pytest.raises(UsageError):
            pointset_from_json({"schema": "rigidlab.relstruct/1"})

    def test_json_via_file(self, tmp_path):
        path = str(tmp_path / "ball.json")
        save_json(pointset_to_json(lattice_ball(1)), path)
        assert pointset_from_json(load_json(path)) == lattice_ball(1)

    def test_product_document(self):
        ps = lattice_ball(1)
        P = build_product(
            ps, [orientation_from_bits(ps, 0), orientation_from_bits(ps, 1)]
        )
        doc = product_to_json(P)
        assert doc["schema"] == "rigidlab.product/1"
        assert doc["structure"]["n"] == 14
        assert doc["structure"]["labels"][0] == {"point": 0, "member": 0}
        assert doc["structure"]["labels"][13] == {"point": 6, "member": 1}


class TestDeterminism:
    def test_canonical_dumps_stable(self):
        doc = pointset_to_json(lattice_ball(2))
        assert dumps_canonical(doc) == dumps_canonical(json.loads(dumps_canonical(doc)))

    def test_svg_stable(self):
        ps = lattice_ball(1)
        o = orientation_from_bits(ps, 7)
        assert pointset_to_svg(ps, o) == pointset_to_svg(ps, o)

    def test_atomic_write_leaves_no_temp(self, tmp_path):
        path = str(tmp_path / "x.json")
        write_text_atomic(path, "hello\n")
        assert open(path).read() == "hello\n"
        leftovers = [f for f in os.listdir(tmp_path) if f.endswith(".part")]
        assert leftovers == []


class TestDot:
    def test_triangle_orientation_arcs(self):
        # four doubled pairs collapse to two bold two-way arcs; the forced
        # (p1, p2) pair stays a single arrow
        tri = base_triangle()
        dot = orientation_to_dot(orientation_from_bits(tri, 0))
        assert dot.count("dir=both") == 2
        assert dot.count("style=bold") == 2
        plain = [l for l in dot.splitlines()
                 if "->" in l and "dir=both" not in l]
        assert len(plain) == 1

    def test_relstruct_nodes(self):
        dot = relstruct_to_dot(RelStruct(3, ((0, 1),)))
        assert dot.count("[label=") == 3

    def test_unitgraph_undirected(self):
        dot = unitgraph_to_dot(base_triangle())
        assert dot.count(" -- ") == 3


class TestSvg:
    def test_has_edges_and_vertices(self):
        svg = pointset_to_svg(lattice_ball(1))
        assert svg.count("<circle") >= 7
        assert svg.count("<line") == 12

    def test_orientation_arrows(self):
        ps = lattice_ball(1)
        svg = pointset_to_svg(ps, orientation_from_bits(ps, 0))
        assert "marker-end" in svg

    def test_overlay_present(self):
        # render an offending fold map as a dashed overlay
        svg = pointset_to_svg(lattice_ball(1), overlay={1: 2, 3: 3})
        assert "stroke-dasharray" in svg

    def test_highlight(self):
        svg = pointset_to_svg(lattice_ball(1), highlight=(0, 4))
        assert svg.count('stroke="#e09f3e"') == 2


class TestCli:
    def run(self, *argv):
        return main(list(argv))

    def test_lattice_writes_seven_points(self, tmp_path):
        out = str(tmp_path / "ball1.json")
        assert self.run("lattice", "--radius", "1", "--out", out) == 0
        assert len(load_json(out)["points"]) == 7

    def test_rigid_exit_code(self, tmp_path):
        path = str(tmp_path / "c3.json")
        save_json(relstruct_to_json(RelStruct(3, ((0, 1), (1, 2), (2, 0)))), path)
        assert self.run("rigid", "--input", path, "--out",
                        str(tmp_path / "r.json")) == 2
        doc = load_json(str(tmp_path / "r.json"))
        assert doc["endomorphisms"] == 3

    def test_rigid_positive(self, tmp_path):
        path = str(tmp_path / "rigid.json")
        save_json(relstruct_to_json(RelStruct(3, ((0, 2), (1, 0)))), path)
        assert self.run("rigid", "--input", path, "--out",
                        str(tmp_path / "r.json")) == 0

    def test_certify_exit_codes(self, tmp_path):
        out = str(tmp_path / "c.json")
        assert self.run("certify", "--gadget", "rhombus", "--x", "A",
                        "--y", "D", "--epsilon", "r3", "--out", out) == 0
        assert self.run("certify", "--gadget", "rhombus", "--x", "A",
                        "--y", "D", "--epsilon", "1", "--out", out) == 2

    def test_budget_exit_code(self, tmp_path):
        code = self.run("certify", "--gadget", "rhombus", "--x", "A",
                        "--y", "D", "--epsilon", "1", "--branch-limit", "1",
                        "--out", str(tmp_path / "b.json"))
        assert code == 3

    def test_usage_exit_code(self):
        assert self.run("lattice") == 4
        assert self.run("no-such-command") == 4

    def test_witness_case1(self, tmp_path):
        out = str(tmp_path / "w.json")
        code = self.run("witness", "--kind", "case1", "--x", "1,0",
                        "--y", "5,0", "--out", out)
        assert code == 0
        assert load_json(out)["valid"] is True

    def test_witness_case2(self, tmp_path):
        out = str(tmp_path / "w2.json")
        code = self.run("witness", "--kind", "case2", "--radius", "1",
                        "--s-bits", "0", "--z-bits", "1", "--x", "0,0",
                        "--out", out)
        assert code == 0
        assert load_json(out)["valid"] is True

    def test_witness_min_no_witness(self, tmp_path):
        path = str(tmp_path / "c3.json")
        save_json(relstruct_to_json(RelStruct(3, ((0, 1), (1, 2), (2, 0)))), path)
        code = self.run("witness", "--kind", "min", "--input", path,
                        "--x", "0", "--y", "1",
                        "--out", str(tmp_path / "m.json"))
        assert code == 2
        assert load_json(str(tmp_path / "m.json"))["exists"] is False

    def test_orient_count(self, tmp_path):
        out = str(tmp_path / "o.json")
        assert self.run("orient", "--radius", "1", "--mode", "count",
                        "--out", out) == 0
        assert load_json(out)["orientations"] == 512

    def test_hom_cycle(self, tmp_path):
        path = str(tmp_path / "c3.json")
        save_json(relstruct_to_json(RelStruct(3, ((0, 1), (1, 2), (2, 0)))), path)
        out = str(tmp_path / "h.json")
        assert self.run("hom", "--src", path, "--dst", path, "--out", out) == 0
        assert load_json(out)["count"] == 3

    def test_product_document(self, tmp_path):
        out = str(tmp_path / "p.json")
        assert self.run("product", "--radius", "1", "--member-bits", "0",
                        "--member-bits", "1", "--out", out) == 0
        doc = load_json(out)
        assert doc["structure"]["n"] == 14
        assert doc["first_conflict"] is not None

    def test_svg_and_dot_formats(self, tmp_path):
        svg = str(tmp_path / "b.svg")
        dot = str(tmp_path / "b.dot")
        assert self.run("lattice", "--radius", "1", "--format", "svg",
                        "--out", svg) == 0
        assert open(svg).read().startswith("<svg")
        assert self.run("lattice", "--radius", "1", "--format", "dot",
                        "--out", dot) == 0
        assert open(dot).read().startswith("graph")

    def test_float_backend_flag(self, tmp_path):
        out = str(tmp_path / "f.json")
        assert self.run("lattice", "--radius", "1", "--backend", "float",
                        "--out", out) == 0
        assert load_json(out)["backend"] == "float"

    def test_threads_env_recorded(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RIGIDLAB_THREADS", "4")
        out = str(tmp_path / "o.json")
        assert self.run("orient", "--radius", "1", "--mode", "count",
                        "--out", out) == 0
        assert load_json(out)["config"]["threads"] == 4

    def test_bad_threads_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("RIGIDLAB_THREADS", "many")
        assert self.run("orient", "--radius", "1", "--mode", "count") == 4
