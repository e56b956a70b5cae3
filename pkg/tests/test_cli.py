import io
import json
import re

import numpy as np
import pytest

from hobokit import compile_hobo, parse_problem
from hobokit.cli import main

FAST = ["--shots", "200", "--sweeps", "100", "--workers", "1"]


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_tt_shapes_line():
    code, text = run("tt", "tsp")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "[(6, 2), (2, 6, 3), (3, 6, 4), (4, 6, 4), (4, 6, 2), (2, 6)]"
    assert "  Complete contraction:  i,j,k,l,m,n,iA,AjB,BkC,ClD,DmE,En->" in lines
    assert "      Naive FLOP count:  1.075e+08" in lines


def test_path_report():
    code, text = run("path", "tsp")
    assert code == 0
    assert "      Naive FLOP count:  3.266e+05" in text.splitlines()
    assert "   Theoretical speedup:  2.917" in text
    code, table = run("path", "tsp", "--steps-table", "--method", "greedy")
    assert code == 0 and "scaling" in table and "ijklmn" in table


def test_solve_pythagoras_text():
    code, text = run("solve", "pythagoras", *FAST)
    assert code == 0
    assert text.startswith("offset\n30.0\nEnergy -30.0, Occurrence ")
    assert re.search(r"^x = \d+\.0$", text, re.M)


def test_solve_seating_prints_grid(tmp_path):
    ppm = tmp_path / "best.ppm"
    code, text = run("solve", "seating", *FAST, "--top", "1", "--ppm", str(ppm))
    assert code == 0 and text.startswith("offset\n0\nEnergy ")
    assert "[[" in text
    data = ppm.read_bytes()
    assert data.startswith(b"P6\n80 80\n255\n") and len(data) == 13 + 80 * 80 * 3


def _parse_text(text):
    lines = text.splitlines()
    assert lines[0] == "offset"
    doc = {"offset": float(lines[1]), "entries": []}
    grid_rows = []
    for line in lines[2:]:
        m = re.fullmatch(r"Energy (\S+), Occurrence (\d+)", line)
        if m:
            doc["entries"].append({"energy": float(m[1]), "occurrence": int(m[2]),
                                   "values": {}, "grids": []})
        elif line.lstrip().startswith("["):
            grid_rows.append([int(c) for c in re.findall(r"\d", line)])
            if line.endswith("]]") or (line.startswith("[") and not line.startswith("[[")):
                doc["entries"][-1]["grids"].append(grid_rows)
                grid_rows = []
        else:
            k, v = line.split(" = ")
            doc["entries"][-1]["values"][k] = float(v)
    return doc


@pytest.mark.parametrize("name", ["seating", "pythagoras", "tsp"])
def test_json_matches_text(name):
    _, text = run("solve", name, *FAST)
    _, js = run("solve", name, *FAST, "--json")
    doc = json.loads(js)
    parsed = _parse_text(text)
    assert parsed["offset"] == doc["offset"]
    assert len(parsed["entries"]) == len(doc["entries"]) == 3
    for t, j in zip(parsed["entries"], doc["entries"]):
        assert (t["energy"], t["occurrence"]) == (j["energy"], j["occurrence"])
        assert t["values"] == j["values"]
        assert t["grids"] == list(j["grids"].values())


@pytest.mark.parametrize("name,offset", [("seating", 0.0), ("pythagoras", 30.0), ("tsp", 360.0)])
def test_example_files(name, offset, tmp_path):
    path = tmp_path / f"{name}.hobo"
    assert run("example", name, "-o", str(path)) == (0, "")
    spec = parse_problem(path.read_text())
    assert compile_hobo(spec.objective, spec.registry)[1] == offset
    code, text = run("solve", str(path), *FAST, "--top", "1")
    assert code == 0 and text.splitlines()[1] == ("0" if offset == 0 else repr(offset))


def test_example_run_and_print():
    code, text = run("example", "tsp")
    assert code == 0 and text.startswith("# TSP")
    code, text = run("example", "tsp", "--run", *FAST, "--sampler", "grad", "--steps", "50")
    assert code == 0 and text.startswith("offset\n360.0\nEnergy -360.0")
    assert "xB = " in text


def test_solve_json_file(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"num_vars": 2, "terms": [{"vars": [0, 1], "coeff": -2}],
                                "constant": 1}))
    code, text = run("solve", str(path), *FAST, "--json")
    doc = json.loads(text)
    assert code == 0 and doc["offset"] == 1.0
    assert doc["entries"][0]["assignment"] == [1, 1] and doc["entries"][0]["energy"] == -2.0
    assert doc["entries"][0]["grids"] == {"x{}": [1, 1]}


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.hobo"
    bad.write_text('var q[2] as "q{}"\nH += q[5]')
    assert run("solve", str(bad), *FAST)[0] == 1
    assert "line 2, column 8" in capsys.readouterr().err
    assert run("path", str(tmp_path / "missing.hobo"))[0] == 1
    linear = tmp_path / "linear.hobo"
    linear.write_text('var q[3] as "q{}"\nH += q[0] - q[1] + 2*q[2]')
    assert run("tt", str(linear))[0] == 2
    with pytest.raises(SystemExit):
        run("solve", "tsp", "--shots", "0")
    with pytest.raises(SystemExit):
        run("tt", "tsp", "--tol", "1.5")


def test_tt_json():
    code, text = run("tt", "tsp", "--json")
    doc = json.loads(text)
    assert code == 0
    assert [tuple(s) for s in doc["core_shapes"]][0] == (6, 2)
    assert doc["report"]["naive_flops"] == 107495424
    assert np.isclose(doc["report"]["largest_intermediate"], 16)
