import io
import json
import subprocess
import sys

import pytest

from orbit_designs.cli import run
from orbit_designs.config import Config
from orbit_designs.scalar import precision, set_precision


@pytest.fixture(autouse=True)
def restore_precision():
    old = precision()
    yield
    set_precision(old)


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


def test_molien_b2():
    code, text = call("molien", "--type", "B", "--rank", "2", "--lmax", "8")
    assert code == 0
    assert json.loads(text)["coefficients"] == [1, 0, 0, 0, 1, 0, 0, 0, 1]


def test_reproduce_table_2():
    code, text = call("reproduce-tables", "--table", "2")
    data = json.loads(text)
    assert code == 0 and data["all_ok"] and len(data["rows"]) >= 13


def test_reproduce_with_param():
    code, text = call("reproduce-tables", "--table", "2", "--param", "5/2", "--param", "4")
    rows = [r for r in json.loads(text)["rows"] if r["parameter"] not in (None,)]
    assert code == 0 and {r["parameter"] for r in rows} == {"5/2", "4"}


def test_missing_file_is_usage_error():
    assert call("check-design", "missing.json")[0] == 2


def test_bad_flags_are_usage_errors(capsys):
    assert call("molien", "--type", "B", "--rank", "2", "--lmax", "8", "--bogus")[0] == 2
    assert call("nonsense")[0] == 2
    assert call("orbit", "--type", "A", "--rank", "11", "--corner", "1")[0] == 2
    assert call("orbit", "--type", "B", "--rank", "3", "--corner", "4")[0] == 2


def test_malformed_design_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert call("check-design", str(p))[0] == 2
    p.write_text(json.dumps({"type": "B", "rank": 3, "J": [1]}))
    assert call("check-design", str(p))[0] == 2


def test_check_design_corner_file(tmp_path):
    p = tmp_path / "oct.json"
    p.write_text(json.dumps({"type": "B", "rank": 2, "J": [1, 2],
                             "radii": {"1": "1", "2": "1"}, "weights": {"1": "1", "2": "1"}}))
    code, text = call("check-design", str(p), "--tmax", "8", "--t", "7")
    data = json.loads(text)
    assert code == 0 and data["agree"] and set(data["strength"].values()) == {7}
    assert data["tight"]["tight"]
    code, _ = call("check-design", str(p), "--tmax", "8", "--t", "8")
    assert code == 1


def test_check_design_point_file(tmp_path):
    pts = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
    p = tmp_path / "cross.json"
    p.write_text(json.dumps({"points": [[str(x) for x in q] for q in pts], "weights": ["1"] * 6}))
    code, text = call("check-design", str(p), "--tmax", "5")
    assert code == 0 and json.loads(text)["strength"] == {"full_harmonic": 3, "direct_integration": 3}


def test_check_design_radical_radius(tmp_path):
    # B3 {1,3} at r3 = sqrt(2): weight 9/(8 r3^4) = 9/32
    p = tmp_path / "b3.json"
    p.write_text(json.dumps({"type": "B", "rank": 3, "J": [1, 3],
                             "radii": {"1": "1", "3": "sqrt(2)"}, "weights": {"1": "1", "3": "9/32"}}))
    code, text = call("check-design", str(p), "--tmax", "6", "--t", "5")
    assert code == 0 and json.loads(text)["strength"]["invariant"] == 5


def test_fisher_and_orbit():
    code, text = call("fisher", "--n", "3", "--t", "5", "--spheres", "2")
    assert code == 0 and json.loads(text)["bound"] == 14
    code, text = call("orbit", "--type", "B", "--rank", "3", "--corner", "2", "--json")
    data = json.loads(text)
    assert data["size"] == 12 and data["norm2"] == {"value": "2", "mode": "rational"}


def test_harm_basis_outputs():
    code, text = call("harm-basis", "--type", "D", "--rank", "4", "--degree", "4")
    assert code == 0 and json.loads(text)["dimension"] == 2
    code, text = call("harm-basis", "--type", "D", "--rank", "4", "--degree", "4", "--closed-form")
    labels = {c["label"] for c in json.loads(text)["closed_forms"]}
    assert labels == {"f4", "f4_2"}


def test_classify_small():
    code, text = call("classify", "--type", "B", "--nmax", "3")
    data = json.loads(text)
    assert code == 0
    assert {(r["n"], r["t"], tuple(r["J"])) for r in data["rows"]} >= {(2, 7, (1, 2)), (3, 7, (1, 2, 3))}


def test_xu_roundtrip(tmp_path):
    out = tmp_path / "f.json"
    code, text = call("xu-build", "--weight", "gaussian", "--n", "3", "--out", str(out))
    assert code == 0 and out.exists()
    code, text = call("xu-verify", str(out))
    data = json.loads(text)
    assert code == 0 and data["conditions_pass"] and data["degree_pass"]
    code, text = call("xu-verify", str(out), "--t", "7")
    assert code == 1 and not json.loads(text)["degree_pass"]


def test_xu_build_unsolvable_exits_one():
    code, text = call("xu-build", "--weight", "gaussian", "--n", "4", "--family", "odd")
    assert code == 1 and "no positive solution" in json.loads(text)["error"]


def test_xu_verify_hand_written(tmp_path):
    p = tmp_path / "n2.json"
    p.write_text(json.dumps({"family": "odd", "n": 2, "m": 1, "lambda": ["1/2"], "r": ["1"]}))
    code, text = call("xu-verify", str(p), "--t", "3")
    assert code == 0


def test_output_is_deterministic():
    a = call("orbit", "--type", "A", "--rank", "3", "--corner", "1")
    b = call("orbit", "--type", "A", "--rank", "3", "--corner", "1")
    assert a == b
    assert a[1].index('"corner"') < a[1].index('"group"') < a[1].index('"points"')


def test_formats():
    code, text = call("molien", "--type", "B", "--rank", "2", "--lmax", "4", "--format", "csv")
    assert code == 0 and text.splitlines()[0].startswith("coefficients,")
    code, text = call("--format", "text", "fisher", "--n", "2", "--t", "4", "--spheres", "2")
    assert "bound: 6" in text
    code, text = call("reproduce-tables", "--table", "2", "--format", "csv")
    assert text.splitlines()[0].split(",")[0] == "J"


def test_precision_options(monkeypatch):
    call("--precision", "128", "molien", "--type", "A", "--rank", "2", "--lmax", "2")
    assert precision() == 128
    monkeypatch.setenv("ORBIT_DESIGNS_PRECISION", "96")
    call("molien", "--type", "A", "--rank", "2", "--lmax", "2")
    assert precision() == 96
    assert call("--precision", "32", "molien", "--type", "A", "--rank", "2", "--lmax", "2")[0] == 2


def test_config_validation():
    assert Config().effective_tolerance_exponent == 128
    with pytest.raises(ValueError):
        Config(orbit_rank_cap=1)
    with pytest.raises(ValueError):
        Config(output_format="xml")


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "orbit_designs.cli", "fisher", "--n", "2", "--t", "7",
                        "--spheres", "1"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["bound"] == 8
