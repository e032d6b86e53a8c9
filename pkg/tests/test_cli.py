import json

import pytest

from relu2.cli import main
from relu2.core import Dataset
from relu2.reductions import cycle_graph


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def sc_file(tmp_path):
    return write(tmp_path / "sc.json", {"universe": 3, "subsets": [[1, 2], [2, 3], [3]]})


def test_generate_setcover(tmp_path, sc_file):
    out = tmp_path / "d.json"
    assert main(["generate", "--reduction", "setcover", "--in", sc_file, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["params"]["n"] == 5
    assert doc["meta"]["command"] == "generate" and doc["meta"]["seed"] == 0


def test_generate_dks_gap_exit(tmp_path, capsys):
    g = write(tmp_path / "c4.json", cycle_graph(4).to_dict())
    assert main(["generate", "--reduction", "dks", "--kappa", "2", "--ell", "1", "--in", g]) == 2
    assert "epsilon" in capsys.readouterr().err


def test_generate_gadget_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["generate", "--reduction", "gadget", "--k", "2", "--points-per-set", "8", "--seed", "7",
                     "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_train_mmcs_total_error(tmp_path):
    circ = write(tmp_path / "c.json", {"inputs": 2, "gates": [{"op": "AND", "in": [0, 1]}], "output": 2})
    d = tmp_path / "d.json"
    r = tmp_path / "r.json"
    assert main(["generate", "--reduction", "mmcs", "--in", circ, "--out", str(d)]) == 0
    assert main(["train", "--in", str(d), "--k", "1", "--out", str(r)]) == 0
    doc = json.loads(r.read_text())
    assert doc["total_error"] == pytest.approx(2 / 900 ** 2, rel=1e-12)
    assert doc["meta"]["mode"] == "exact"


def test_train_modes(tmp_path):
    data = write(tmp_path / "d.json", Dataset([[1.0, 0.0], [0.0, 1.0]], [0.7, 0.0], bounded=True).to_dict())
    r = tmp_path / "r.json"
    assert main(["train", "--in", data, "--k", "1", "--mode", "lp-realizable", "--out", str(r)]) == 0
    assert json.loads(r.read_text())["loss"] <= 1e-12
    assert main(["train", "--in", data, "--k", "1", "--mode", "epsnet", "--net-spacing", "0.25",
                 "--out", str(r)]) == 0
    assert main(["oracle", "--in", data, "--k", "1", "--out", str(r)]) == 0
    assert "resolution_bound" in json.loads(r.read_text())
    pair = write(tmp_path / "p.json", Dataset([[1.0], [-1.0]], [1.0, 1.0]).to_dict())
    assert main(["train", "--in", pair, "--k", "1", "--mode", "lp-realizable"]) == 5


def test_train_budget_exit(tmp_path, capsys):
    data = write(tmp_path / "d.json", Dataset([[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]], [1.0, 1.0, 0.0]).to_dict())
    assert main(["train", "--in", data, "--k", "2", "--enum-cap", "4"]) == 3
    assert "budget" in capsys.readouterr().err


def test_verify_dispatch(tmp_path, sc_file):
    d = tmp_path / "d.json"
    main(["generate", "--reduction", "setcover", "--in", sc_file, "--out", str(d)])
    sol = write(tmp_path / "s.json", {"solution": [0, 1]})
    rep = tmp_path / "rep.json"
    assert main(["verify", "--in", str(d), "--solution", sol, "--out", str(rep)]) == 0
    assert json.loads(rep.read_text())["overall"]
    assert main(["verify", "--in", sc_file, "--roundtrip-setcover", "--out", str(rep)]) == 0

    h = write(tmp_path / "c4.json", cycle_graph(4).to_dict())
    main(["generate", "--reduction", "coloring", "--k", "2", "--in", h, "--out", str(d)])
    assert main(["verify", "--in", str(d), "--soundness", "--out", str(rep)]) == 0


def test_verify_unverifiable_exit(tmp_path):
    h = write(tmp_path / "c14.json", cycle_graph(14).to_dict())
    d = tmp_path / "d.json"
    main(["generate", "--reduction", "coloring", "--k", "2", "--in", h, "--out", str(d)])
    rep = tmp_path / "r.json"
    assert main(["verify", "--in", str(d), "--soundness", "--out", str(rep)]) == 4
    assert json.loads(rep.read_text())["status"] == "unverifiable"


def test_verify_compose_fixed_coeffs(tmp_path):
    d = tmp_path / "d.json"
    h = write(tmp_path / "c4.json", cycle_graph(4).to_dict())
    main(["generate", "--reduction", "coloring", "--k", "2", "--in", h, "--out", str(d)])
    c = tmp_path / "c.json"
    main(["generate", "--reduction", "compose", "--k", "2", "--simple-pair", "--in", str(d), "--out", str(c)])
    rep = tmp_path / "r.json"
    code = main(["verify", "--in", str(c), "--soundness", "--fix-coeffs", "1,1", "--out", str(rep)])
    assert code == 0


def test_complexity(capsys):
    assert main(["complexity", "--k", "1", "--epsilon", "1", "--delta", "1", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["agnostic_m"] == 1024 and doc["realizable_m"] == 12208072
    assert main(["complexity", "--k", "1", "--epsilon", "2", "--delta", "1"]) == 1


def test_input_errors(tmp_path, capsys):
    assert main(["generate", "--reduction", "setcover"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"universe": 3,\n "subsets": [[1, 2],, [3]]}')
    assert main(["generate", "--reduction", "setcover", "--in", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert main(["generate", "--reduction", "setcover", "--in", str(tmp_path / "missing.json")]) == 1
    sc = write(tmp_path / "sc.json", {"universe": 3, "subsets": [[1, 9]]})
    assert main(["generate", "--reduction", "setcover", "--in", sc]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["train", "--k", "1"])
    assert exc.value.code == 1
    data = write(tmp_path / "d.json", Dataset([[1.0]], [1.0]).to_dict())
    assert main(["train", "--in", data, "--k", "2", "--fix-coeffs", "1,0"]) == 1
