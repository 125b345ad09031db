"""Golden tests for the command-line interface: outputs, exit codes, schema."""

import io
import json
from pathlib import Path

import jsonschema
import pytest

from fockspec.cli import main

SCHEMA = json.loads(
    (Path(__file__).resolve().parent.parent / "docs" / "cli_schema.json").read_text()
)


def run_cli(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run_cli(*argv)
    payload = json.loads(text)
    jsonschema.validate(payload, SCHEMA)
    return code, payload


# -- normal-order ----------------------------------------------------------------


def test_normal_order_reordering():
    code, payload = run_json("normal-order", "--expr", "a^2*b^2")
    assert code == 0
    assert payload["result"]["canonical"] == "b^2*a^2 + 4*b*a + 2"
    assert payload["result"]["terms"][0] == {"b": 2, "a": 2, "coeff": "1"}


def test_normal_order_commutator():
    code, payload = run_json("normal-order", "--expr", "a*b-b*a")
    assert code == 0
    assert payload["result"]["canonical"] == "1"


def test_normal_order_unbound_parameter_exits_2():
    code, payload = run_json("normal-order", "--expr", "k*a")
    assert code == 2
    assert "unbound parameter 'k'" in payload["diagnostics"][0]


def test_parse_error_exits_1():
    code, payload = run_json("normal-order", "--expr", "a +* b")
    assert code == 1


def test_missing_operator_exits_1():
    code, _ = run_json("normal-order")
    assert code == 1


# -- classify ----------------------------------------------------------------------


def test_classify_hermite():
    code, payload = run_json("classify", "--op", "hermite", "--nmax", "8")
    assert code == 0
    assert payload["result"]["exactly_solvable"] is True
    assert payload["result"]["invariant_degrees"] == list(range(9))


def test_classify_lame():
    code, payload = run_json(
        "classify", "--op", "lame",
        "--bind", "m=2", "--bind", "d=1", "--bind", "n=3",
        "--nmax", "8",
    )
    assert code == 0
    assert payload["result"]["invariant_degrees"] == [3]
    assert payload["result"]["constraint_residuals"] == ["0"]


def test_classify_creation_operator():
    code, payload = run_json("classify", "--expr", "b", "--nmax", "6")
    assert code == 0
    assert payload["result"]["exactly_solvable"] is False
    assert payload["result"]["invariant_degrees"] == []
    assert payload["result"]["leakage_witness"]["overflow"][-1] == "1"


def test_classify_missing_binding_exits_2():
    code, payload = run_json("classify", "--op", "lame", "--bind", "m=2")
    assert code == 2
    assert "missing binding" in payload["diagnostics"][0]


# -- spectrum ----------------------------------------------------------------------


def test_spectrum_hermite_differential():
    code, payload = run_json(
        "spectrum", "--op", "hermite", "--n", "5", "--realization", "differential"
    )
    assert code == 0
    result = payload["result"]
    assert result["char_poly"]["text"] == (
        "t^6 - 15*t^5 + 85*t^4 - 225*t^3 + 274*t^2 - 120*t"
    )
    exact = [pair["eigenvalue"]["exact"] for pair in result["eigenpairs"]]
    assert exact == ["0", "1", "2", "3", "4", "5"]


def test_spectrum_sextic_numeric():
    code, payload = run_json(
        "spectrum", "--op", "sextic",
        "--bind", "alpha=1", "--bind", "beta=0", "--bind", "n=1",
        "--n", "1",
    )
    assert code == 0
    result = payload["result"]
    assert result["char_poly"]["text"] == "t^2 - 8"
    res = [pair["eigenvalue"] for pair in result["eigenpairs"]]
    assert res[0]["re"] == pytest.approx(-2.8284271247461903, abs=1e-12)
    assert res[1]["re"] == pytest.approx(2.8284271247461903, abs=1e-12)
    assert all(r["residual"] <= 1e-12 for r in res)


def test_spectrum_delta_realization():
    code, payload = run_json(
        "spectrum", "--op", "hermite", "--n", "3",
        "--realization", "delta", "--delta", "1/3",
    )
    assert code == 0
    assert payload["result"]["realization"] == "delta=1/3"
    assert payload["result"]["char_poly"]["coeffs"] == ["0", "-6", "11", "-6", "1"]


def test_spectrum_leakage_exits_3():
    code, payload = run_json("spectrum", "--expr", "b", "--n", "2")
    assert code == 3
    assert payload["result"]["leakage"]["column"] == 2
    assert payload["result"]["leakage"]["overflow"] == ["0", "0", "0", "1"]


def test_spectrum_complex_fiber():
    code, payload = run_json(
        "spectrum", "--op", "number", "--n", "3",
        "--realization", "complex", "--fiber-m", "2",
    )
    assert code == 0
    exact = [p["eigenvalue"]["exact"] for p in payload["result"]["eigenpairs"]]
    assert exact == ["0", "1", "2", "3"]


# -- isospectral -------------------------------------------------------------------


def test_isospectral_hermite_defaults():
    code, payload = run_json("isospectral", "--op", "hermite", "--n", "5")
    assert code == 0
    result = payload["result"]
    assert result["equal"] is True
    labels = [entry["realization"] for entry in result["char_polys"]]
    assert labels == [
        "differential", "delta=1", "delta=1/3", "q=2", "q=1/2", "complex m=0",
    ]
    assert len({entry["text"] for entry in result["char_polys"]}) == 1


def test_isospectral_lame_with_fibers():
    code, payload = run_json(
        "isospectral", "--op", "lame",
        "--bind", "m=2", "--bind", "d=1", "--bind", "n=3",
        "--n", "3", "--fibers", "0,1,2,3,4",
    )
    assert code == 0
    assert payload["result"]["equal"] is True
    assert len(payload["result"]["char_polys"]) == 10


def test_isospectral_sextic():
    code, payload = run_json(
        "isospectral", "--op", "sextic",
        "--bind", "alpha=1", "--bind", "beta=1", "--bind", "n=2",
        "--n", "2",
    )
    assert code == 0
    assert payload["result"]["equal"] is True
    assert all(len(e["coeffs"]) == 4 for e in payload["result"]["char_polys"])


# -- catalog ------------------------------------------------------------------------


def test_catalog_listing():
    code, payload = run_json("catalog")
    assert code == 0
    names = [op["name"] for op in payload["result"]["operators"]]
    for required in (
        "hermite", "laguerre", "heun", "lame", "sextic",
        "number", "jplus", "jzero", "jminus",
    ):
        assert required in names
    lame_entry = next(op for op in payload["result"]["operators"] if op["name"] == "lame")
    assert lame_entry["params"] == ["m", "d", "n"]


# -- determinism and config -----------------------------------------------------------


def test_json_output_is_byte_stable():
    args = (
        "spectrum", "--op", "sextic",
        "--bind", "alpha=1", "--bind", "beta=0", "--bind", "n=1", "--n", "1",
    )
    _, first = run_cli(*args)
    _, second = run_cli(*args)
    assert first == second


def test_config_file_overridden_by_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("tol=1e-6\ndeltas=2,3\nformat=json\n")
    code, payload = run_json(
        "--config", str(cfg), "--tol", "1e-10", "isospectral",
        "--op", "hermite", "--n", "2",
    )
    assert code == 0
    assert payload["config"]["tol"] == 1e-10  # flag wins
    assert payload["config"]["deltas"] == ["2", "3"]  # file value survives
    labels = [e["realization"] for e in payload["result"]["char_polys"]]
    assert "delta=2" in labels and "delta=3" in labels


def test_text_format():
    code, text = run_cli(
        "--format", "text", "normal-order", "--expr", "a*b"
    )
    assert code == 0
    assert "canonical: b*a + 1" in text


def test_heun_entry_through_the_cli():
    # cubic-family coefficients matching sextic(alpha=1, beta=0) at n = 3
    code, payload = run_json(
        "spectrum", "--op", "heun",
        "--bind", "a1=-4", "--bind", "b2=4", "--bind", "b0=-2",
        "--bind", "d1=-12", "--bind", "n=3", "--n", "3",
    )
    assert code == 0
    assert len(payload["result"]["char_poly"]["coeffs"]) == 5  # degree 4
    assert len(payload["result"]["eigenpairs"]) == 4


def test_heun_nilpotent_top_block():
    # with only a3, b2, d1 set, the restriction is nilpotent: t^4, a single
    # eigenvector for the fourfold eigenvalue 0
    code, payload = run_json(
        "spectrum", "--op", "heun",
        "--bind", "a3=4", "--bind", "b2=6", "--bind", "d1=-42",
        "--bind", "n=3", "--n", "3",
    )
    assert code == 0
    assert payload["result"]["char_poly"]["text"] == "t^4"
    assert len(payload["result"]["eigenpairs"]) == 1


def test_heun_constraint_violation_exits_3():
    code, payload = run_json(
        "spectrum", "--op", "heun",
        "--bind", "a3=4", "--bind", "b2=6", "--bind", "d1=-41",
        "--bind", "n=3", "--n", "3",
    )
    assert code == 3
    assert "residual" in payload["diagnostics"][0]


def test_bad_tolerance_exits_1():
    code, payload = run_json("--tol", "-1", "normal-order", "--expr", "a")
    assert code == 1
    assert "tolerance" in payload["diagnostics"][0]


def test_degree_overflow_exits_1():
    code, payload = run_json("normal-order", "--expr", "b^40*b^40")
    assert code == 1
    assert "degree cap" in payload["diagnostics"][0]


def test_bad_realization_parameter_exits_1():
    code, payload = run_json(
        "spectrum", "--op", "hermite", "--n", "2", "--realization", "q", "--q", "1"
    )
    assert code == 1
    assert "q must differ" in payload["diagnostics"][0]


def test_numeric_non_convergence_exits_4():
    # complex pair with a one-step iteration budget cannot converge
    code, payload = run_json(
        "--iter-cap", "1",
        "spectrum", "--op", "sextic",
        "--bind", "alpha=-1", "--bind", "beta=0", "--bind", "n=1",
        "--n", "1",
    )
    assert code == 4
    assert "converge" in payload["diagnostics"][0]
