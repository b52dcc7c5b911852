import json
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

from wittkit import cli, rayclass, witt
from wittkit.domains import BigComplex
from wittkit.errors import UsageError
from wittkit.modular import CharFamily, FrickeFamily, JFamily
from wittkit.qfield import QuadElement, enumerate_ideals, make_field, principal_ideal

K1 = make_field(-1)
K5 = make_field(-5)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_parse_field_tokens():
    assert cli.parse_field("Q").is_rational
    assert cli.parse_field("q").is_rational
    assert cli.parse_field(-5).d == -5
    with pytest.raises(UsageError):
        cli.parse_field("abc")


def test_parse_ideal_tokens():
    two = principal_ideal(QuadElement(K1, Fraction(2), Fraction(0)))
    assert cli.parse_ideal(K1, "2") == two
    assert cli.parse_ideal(K1, "(2)") == two
    assert cli.parse_ideal(K1, "2:0:2") == two
    assert int(cli.parse_ideal(K1, "1,1").norm()) == 2
    with pytest.raises(UsageError):
        cli.parse_ideal(K1, "one")
    with pytest.raises(UsageError):
        cli.parse_ideal(K1, "1:2")


def test_parse_family_tokens():
    assert isinstance(cli.parse_family(K5, "j"), JFamily)
    fam = cli.parse_family(K5, "fricke:1/2,0")
    assert isinstance(fam, FrickeFamily) and fam.level == 2
    assert isinstance(cli.parse_family(K1, "char:1,1"), CharFamily)
    with pytest.raises(UsageError):
        cli.parse_family(K5, "bogus")
    with pytest.raises(UsageError):
        cli.parse_family(K5, "fricke:1/2")


def test_field_info(capsys):
    code, data = run_cli(capsys, "field", "info", "--d", "-5", "--primes", "10")
    assert code == 0
    assert data["class_number"] == 2
    assert data["params"]["prime_norm_bound"] == 10


def test_drf_build_matches_library(capsys, tmp_path):
    out = tmp_path / "drf.json"
    code, _ = run_cli(capsys, "drf", "build", "--d", "Q", "--modulus", "6", "--out", str(out))
    assert code == 0
    data = json.loads(out.read_text())
    monoid = rayclass.build_drf(make_field(1), principal_ideal(QuadElement(make_field(1), Fraction(6), Fraction(0))))
    assert data["table"] == [list(row) for row in monoid.table]
    assert data["units"] == list(monoid.unit_indices)


def _write_spec(tmp_path, name, spec):
    p = tmp_path / name
    p.write_text(json.dumps(spec))
    return str(p)


def test_witt_verify_pass_and_fail(capsys, tmp_path):
    good = _write_spec(tmp_path, "good.json", {"kind": "zeta", "gamma": "1/3", "bound": 200})
    code, data = run_cli(capsys, "witt", "verify", "--vector", good, "--depth", "2", "--primes", "13")
    assert code == 0 and data["passed"]
    assert data["params"]["depth"] == 2
    bad = _write_spec(
        tmp_path, "bad.json", {"kind": "zlin", "terms": [["1/2", "1/3"]], "bound": 200}
    )
    code, data = run_cli(capsys, "witt", "verify", "--vector", bad, "--depth", "1", "--primes", "7")
    assert code == 1 and not data["passed"]


def test_witt_orbit_and_modulus(capsys, tmp_path):
    spec = _write_spec(tmp_path, "z3.json", {"kind": "zeta", "gamma": "1/3", "bound": 200})
    code, data = run_cli(capsys, "witt", "orbit", "--vector", spec, "--primes", "10")
    assert code == 0 and data["size"] == 3
    code, data = run_cli(capsys, "witt", "modulus", "--vector", spec)
    assert code == 0 and data["found"] and data["label"] == "(3)"


def test_cyclic_search_asserts_nothing(capsys):
    code, data = run_cli(
        capsys,
        "witt",
        "cyclic-search",
        "--target-size",
        "3",
        "--max-den",
        "3",
        "--coeff-bound",
        "1",
        "--limit",
        "10",
        "--bound",
        "200",
        "--primes",
        "7",
    )
    assert code == 0
    assert data["n_hits"] >= 1
    assert any(h["terms"] in ([[1, "1/3"]], [[-1, "1/3"]]) for h in data["hits"])
    assert "asserts nothing" in data["note"]


def test_automata_minimize_and_dot(capsys, tmp_path):
    spec = _write_spec(tmp_path, "z3.json", {"kind": "zeta", "gamma": "1/3", "bound": 200})
    dot = tmp_path / "m.dot"
    code, data = run_cli(
        capsys, "automata", "minimize", "--vector", spec, "--primes", "10", "--dot", str(dot)
    )
    assert code == 0 and data["n_states"] == 3
    assert dot.read_text().startswith("digraph dfao {")
    code, data = run_cli(capsys, "automata", "check-bridy", "--vector", spec, "--primes", "10")
    assert code == 0 and data["equal"]


def test_modular_eval_then_minpoly(capsys, tmp_path):
    vec = tmp_path / "vec.json"
    code, _ = run_cli(
        capsys,
        "modular",
        "eval",
        "--d",
        "-5",
        "--bound",
        "12",
        "--prec",
        "120",
        "--out",
        str(vec),
    )
    assert code == 0
    code, data = run_cli(
        capsys, "algrec", "minpoly", "--value-from", str(vec), "--index", "1", "--dmax", "8"
    )
    assert code == 0
    assert data["poly"]["coeffs"] == [-681472000, -1264000, 1]
    # outside the stored bound
    code, _ = run_cli(
        capsys, "algrec", "minpoly", "--value-from", str(vec), "--index", "13", "--dmax", "4"
    )
    assert code == 2


def test_minpoly_no_relation_exits_3(capsys, tmp_path):
    with mpmath.workdps(75):
        pi = mpmath.mpc(mpmath.pi)
    xi = witt.WittVector(
        K5, BigComplex(60), 4, values={a: pi for a in enumerate_ideals(K5, 4)}
    )
    vec = tmp_path / "pi.json"
    vec.write_text(json.dumps(xi.to_json()))
    code, data = run_cli(
        capsys, "algrec", "minpoly", "--value-from", str(vec), "--index", "1", "--dmax", "6"
    )
    assert code == 3
    assert data["found"] is False


def test_classpoly_cmd(capsys):
    code, data = run_cli(capsys, "algrec", "classpoly", "--d", "-15")
    assert code == 0
    assert data["poly"]["coeffs"] == [-121287375, 191025, 1]


def test_check_cmd(capsys):
    code, data = run_cli(
        capsys, "check", "--d", "-1", "--level", "2", "--bound", "30", "--prec", "120"
    )
    assert code == 0
    result = data["results"][0]
    assert result["passed"]
    assert result["shift_classes"] == result["ray_classes"] == 3
    assert result["gcd_constant_per_class"]


def test_pipeline_deterministic_and_cached(capsys, tmp_path):
    cfg = {
        "d": -5,
        "bound": 20,
        "prime_norm_bound": 10,
        "prec": 100,
        "level": 1,
        "modulus": "2",
        "family": "j",
        "dmax": 8,
        "cache_dir": str(tmp_path / "cache"),
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({**cfg, "out_dir": str(tmp_path / "run1")}))
    code, first = run_cli(capsys, "pipeline", "--config", str(cfg_path))
    assert code == 0
    assert first["cache_hits"] == []
    code, second = run_cli(
        capsys, "pipeline", "--config", str(cfg_path), "--out-dir", str(tmp_path / "run2")
    )
    assert code == 0
    assert set(second["cache_hits"]) == set(first["cache_misses"])
    run1, run2 = tmp_path / "run1", tmp_path / "run2"
    names = sorted(p.name for p in run1.iterdir())
    assert names == sorted(p.name for p in run2.iterdir())
    for name in names:
        assert (run1 / name).read_bytes() == (run2 / name).read_bytes(), name


def test_pipeline_detects_poisoned_cache(capsys, tmp_path):
    cfg = {
        "d": -5,
        "bound": 12,
        "prime_norm_bound": 10,
        "prec": 100,
        "jobs": ["field", "vector"],
        "out_dir": str(tmp_path / "out"),
        "cache_dir": str(tmp_path / "cache"),
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    code, _ = run_cli(capsys, "pipeline", "--config", str(cfg_path))
    assert code == 0
    entries = sorted((tmp_path / "cache").glob("*.json"))
    assert entries
    data = json.loads(entries[0].read_text())
    first = sorted(data["files"])[0]
    entry = data["files"][first]
    if entry["type"] == "json":
        entry["data"]["d"] = 999
    else:
        entry["data"] = "tampered\n" + entry["data"]
    entries[0].write_text(json.dumps(data, sort_keys=True, indent=2) + "\n")
    code, _ = run_cli(capsys, "pipeline", "--config", str(cfg_path))
    assert code == 2


def test_pipeline_config_validation(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"d": -5, "frobnicate": 1}))
    code, _ = run_cli(capsys, "pipeline", "--config", str(bad))
    assert code == 2
    low = tmp_path / "low.json"
    low.write_text(json.dumps({"d": -5, "prec": 30}))
    code, _ = run_cli(capsys, "pipeline", "--config", str(low))
    assert code == 2
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"d": -5, "jobs": ["nonsense"]}))
    code, _ = run_cli(capsys, "pipeline", "--config", str(job))
    assert code == 2


def test_stored_vector_roundtrip(tmp_path):
    xi = witt.zeta_gamma(6, 1, 60)
    path = tmp_path / "z6.json"
    path.write_text(json.dumps(xi.to_json()))
    back = cli.load_vector(str(path))
    assert back.bound == 60
    for a in back.ideals():
        assert back.domain.eq(back.value_at(a), xi.value_at(a))
