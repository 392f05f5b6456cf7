import json

import pytest
from hypothesis import given, strategies as st

from conftest import MAPS, small_random_map
from kwising.cli import main
from kwising.exactalg.gaussrat import GaussRat
from kwising.exactalg.poly import GPoly
from kwising.mapfile import MapFileError, parse_map, read_map, serialize_map

FIG8 = """# figure eight
surface counterclockwise
vertex v : h1 h1' h2 h2'
edge 1 : h1 h1'
edge 2 : h2 h2'
"""


def test_parse_fig8():
    m = parse_map(FIG8)
    assert (m.n_vertices, m.n_edges, m.genus) == (1, 2, 0)
    assert [str(w) for w in m.weights] == ["x1", "x2"]


def test_weights_and_coords():
    m = parse_map("""vertex a : p\nvertex b : q
edge e : p q weight 1/2-3*I
coord a : 0 0
coord b : 3/2 1
""")
    assert m.weights[0] == GPoly.const(GaussRat.parse("1/2-3*I"))
    assert m.coords[1][0] == GaussRat.parse("3/2").re


@pytest.mark.parametrize("text, line", [
    ("vertex a : p q\nvertex b : r s\nedge 1 : p q\nedge 2 : q r\nedge 3 : s t\n", 4),
    ("vertex a : p\nvertex a : q\nedge 1 : p q\n", 2),
    ("vertex a : p q\nedge 1 : p q weight 2x\n", 2),
    ("vertex a : p q\nedge 1 : p q\nbogus\n", 3),
    ("vertex a : p q\nedge 1 : p p\n", 2),
])
def test_parse_errors_have_locations(text, line):
    with pytest.raises(MapFileError) as err:
        parse_map(text)
    assert err.value.line == line


def test_dangling_half_edge():
    with pytest.raises(MapFileError, match="dangling"):
        parse_map("vertex a : p q r\nedge 1 : p q\n")


def test_partial_coordinates_rejected():
    with pytest.raises(MapFileError):
        parse_map("vertex a : p\nvertex b : q\nedge 1 : p q\ncoord a : 0 0\n")


@given(st.integers(0, 10 ** 6))
def test_roundtrip(seed):
    m = small_random_map(seed)
    m2 = parse_map(serialize_map(m))
    assert m2.rotations == m.rotations and m2.weights == m.weights
    assert serialize_map(m2) == serialize_map(m)


def test_roundtrip_keeps_names():
    m = parse_map(FIG8)
    assert serialize_map(parse_map(serialize_map(m))) == serialize_map(m)
    assert "vertex v : h1 h1' h2 h2'" in serialize_map(m)


@pytest.mark.parametrize("name", ["fig8-planar", "fig8-torus", "tree", "k4"])
def test_bundled_maps_parse(name):
    read_map(MAPS / f"{name}.map")


# --- command line -----------------------------------------------------------------


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def test_partition_torus_all_methods(capsys):
    code, out = run(capsys, "partition", MAPS / "fig8-torus.map", "--method", "all", "--symbolic")
    assert code == 0
    lines = out.splitlines()
    for method in ("brute", "kacward", "pfaffian"):
        assert any(l.split()[0] == method and l.endswith("1 + x1 + x2 + x1*x2") for l in lines)


def test_partition_tree(capsys):
    code, out = run(capsys, "partition", MAPS / "tree.map", "--method", "all", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["agree"]
    assert {r["value"] for r in rep["results"].values()} == {"1"}


def test_spins_torus(capsys):
    code, out = run(capsys, "spins", MAPS / "fig8-torus.map", "--json")
    rep = json.loads(out)
    assert code == 0 and len(rep["classes"]) == 4
    assert sum(c["arf"] for c in rep["classes"]) == 1


def test_eval_is_deterministic(capsys):
    args = ["partition", MAPS / "k4.map", "--eval", "random", "--seed", "7", "--json"]
    _, a = run(capsys, *args)
    _, b = run(capsys, *args)
    assert a == b
    assert json.loads(a)["agree"]
    _, c = run(capsys, "partition", MAPS / "k4.map", "--eval", "random", "--seed", "8", "--json")
    assert json.loads(c)["point"] != json.loads(a)["point"]


def test_eval_explicit_point(capsys):
    code, out = run(capsys, "partition", MAPS / "fig8-planar.map", "--eval", "x1=1,x2=1/2", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["results"]["brute"]["scalar"] == {"re": "3", "im": "0"}


@pytest.mark.parametrize("name", ["fig8-planar", "fig8-torus", "tree", "k4"])
def test_verify_full_on_bundled_maps(capsys, name):
    code, out = run(capsys, "verify", MAPS / f"{name}.map", "--level", "full")
    assert code == 0, out
    assert "fail" not in out


def test_matrices_and_zeta(capsys):
    code, out = run(capsys, "matrices", MAPS / "fig8-torus.map", "--spin", "3", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["kacward"]["size"] == 4
    code, out = run(capsys, "zeta", MAPS / "fig8-torus.map", "--max-len", "5", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and len(rep["classes"]) == 4


def test_bench_small(capsys):
    code, out = run(capsys, "bench", "--torus", "3", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["brute"]["rel_error"] <= 1e-12


@pytest.mark.parametrize("argv", [
    ["partition", "no-such-file.map"],
    ["partition", str(MAPS / "k4.map"), "--eval", "y=1"],
    ["matrices", str(MAPS / "k4.map"), "--spin", "5"],
    ["zeta", str(MAPS / "k4.map"), "--max-len", "40"],
    ["frobnicate"],
])
def test_input_errors_exit_2(capsys, argv):
    assert main(argv) == 2


def test_bad_map_file_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.map"
    p.write_text("vertex a : p q\nedge 1 : p q\nedge 2 : q r\n")
    assert main(["partition", str(p)]) == 2
    assert "line 3" in capsys.readouterr().err
