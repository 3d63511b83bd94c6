import json
from pathlib import Path

import pytest

import main
from constants import EXIT_DOMAIN_ERROR, EXIT_OK, EXIT_USAGE_ERROR

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture(name: str) -> str:
    return str(FIXTURES / name)


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    monkeypatch.delenv("CENSUS_BUDGET", raising=False)


@pytest.fixture
def invoke(capsys):
    def run(*argv):
        code = main.run(list(argv))
        out = capsys.readouterr().out
        return code, json.loads(out), out
    return run


@pytest.fixture
def saved(invoke, tmp_path):
    """Runs a command and stores its full result envelope as a file."""
    def run(name, *argv):
        code, document, out = invoke(*argv)
        assert code == EXIT_OK, document
        path = tmp_path / name
        path.write_text(out, encoding="utf-8")
        return document["payload"], str(path)
    return run


def test_check(invoke):
    code, document, _ = invoke("check", "--point", fixture("nilpotent_point.json"))
    assert code == EXIT_OK
    assert document["status"] == "ok"
    assert document["payload"] == {
        "relations_hold": True,
        "is_cyclic": True,
        "valid": True,
        "krylov_words": [[], [1]],
    }
    assert document["diagnostics"] == []


def test_check_reports_a_failing_point(invoke, tmp_path):
    point = json.loads((FIXTURES / "commuting_point.json").read_text())
    point["matrices"][0] = [["0", "1"], ["0", "0"]]
    path = tmp_path / "point.json"
    path.write_text(json.dumps(point))
    code, document, _ = invoke("check", "--point", str(path))
    assert code == EXIT_OK
    assert document["payload"]["relations_hold"] is False
    assert document["payload"]["valid"] is False
    assert document["diagnostics"]


def test_canonical_form(invoke):
    code, document, _ = invoke("canon", "--point", fixture("free2_point.json"))
    assert code == EXIT_OK
    form = document["payload"]["canonical_form"]
    assert form["basis_words"] == [[], [2]]
    assert form["border"] == [
        {"word": [1], "coefficients": ["1", "0"]},
        {"word": [1, 2], "coefficients": ["6", "-1"]},
        {"word": [2, 2], "coefficients": ["3/2", "1"]},
    ]
    assert form["canonical_point"]["y"] == ["1", "0"]


def test_canonical_form_is_a_fixed_point(saved, invoke):
    first, path = saved("canon.json", "canon", "--point", fixture("free2_point.json"))
    _, again, _ = invoke("canon", "--point", path)
    assert again["payload"] == first


def test_orbit_equality(saved, invoke, tmp_path):
    _, path = saved("canon.json", "canon", "--point", fixture("free2_point.json"))
    _, document, _ = invoke("orbit-eq", "--point", fixture("free2_point.json"), "--other", path)
    assert document["payload"] == {"orbit_equal": True}

    point = json.loads((FIXTURES / "free2_point.json").read_text())
    point["matrices"] = [[["0", "0"], ["0", "0"]], [["0", "0"], ["1", "0"]]]
    other = tmp_path / "other.json"
    other.write_text(json.dumps(point))
    _, document, _ = invoke("orbit-eq", "--point", str(other), "--other", path)
    assert document["payload"] == {"orbit_equal": False}


def test_ideal_round_trip(saved, invoke):
    canon, _ = saved("canon.json", "canon", "--point", fixture("free2_point.json"))
    ideal, path = saved("ideal.json", "ideal", "--point", fixture("free2_point.json"))
    assert len(ideal["ideal"]["generators"]) == 3
    _, document, _ = invoke("from-ideal", "--ideal", path)
    assert document["payload"]["point"] == canon["canonical_form"]["canonical_point"]


def test_normal_form(saved, invoke, tmp_path):
    _, path = saved("ideal.json", "ideal", "--point", fixture("free2_point.json"))
    _, document, _ = invoke("normal-form", "--ideal", path, "--word", "2,1")
    assert document["payload"] == {"normal_form": [{"coeff": "1", "word": [2]}], "in_ideal": False}

    poly = tmp_path / "poly.json"
    poly.write_text(json.dumps([{"coeff": "1", "word": [1]}, {"coeff": "-1", "word": []}]))
    _, document, _ = invoke("normal-form", "--ideal", path, "--poly", str(poly))
    assert document["payload"] == {"normal_form": [], "in_ideal": True}


def test_normal_form_needs_an_input(saved, invoke):
    _, path = saved("ideal.json", "ideal", "--point", fixture("free2_point.json"))
    code, document, _ = invoke("normal-form", "--ideal", path)
    assert code == EXIT_USAGE_ERROR
    assert document["status"] == "error"


def test_normal_form_checks_the_support_condition(invoke, tmp_path):
    ideal = {
        "algebra": json.loads((FIXTURES / "free1.json").read_text()),
        "n": 1,
        "basis_words": [[]],
        "generators": [{"border": [1], "poly": [{"coeff": "1", "word": [1]}, {"coeff": "-1", "word": [1, 1]}]}],
    }
    path = tmp_path / "ideal.json"
    path.write_text(json.dumps(ideal))
    for argv in (("normal-form", "--ideal", str(path), "--word", "1"), ("from-ideal", "--ideal", str(path))):
        code, document, _ = invoke(*argv)
        assert code == EXIT_DOMAIN_ERROR
        assert document["payload"]["type"] == "SupportConditionError"


def test_cells_and_count(invoke):
    _, document, _ = invoke("cells", "--m", "2", "--n", "2")
    assert document["payload"]["cells"] == [
        {"basis_words": [[], [1]], "dimension": 6},
        {"basis_words": [[], [2]], "dimension": 5},
    ]
    _, document, _ = invoke("count", "--m", "2", "--n", "3")
    assert document["payload"] == {"polynomial": {"12": 1, "11": 1, "10": 2, "9": 1}}


def test_output_is_deterministic(invoke):
    outputs = {invoke("count", "--m", "3", "--n", "3")[2] for _ in range(2)}
    assert len(outputs) == 1
    outputs = {invoke("canon", "--point", fixture("free2_point.json"))[2] for _ in range(2)}
    assert len(outputs) == 1


def test_census(invoke):
    code, document, _ = invoke("census", "--algebra", fixture("free2.json"), "--n", "2", "--q", "2")
    assert code == EXIT_OK
    census = document["payload"]["census"]
    assert (census["cyclic_count"], census["orbit_count"], census["polynomial_value"]) == (576, 96, 96)
    assert document["diagnostics"] == []


def test_census_of_a_quotient(invoke):
    _, document, _ = invoke(
        "census", "--algebra", fixture("commutative2.json"), "--n", "2", "--q", "2", "--shards", "3"
    )
    assert document["payload"]["census"]["orbit_count"] == 24
    assert "polynomial_value" not in document["payload"]["census"]


def test_census_budget(invoke, monkeypatch):
    monkeypatch.setenv("CENSUS_BUDGET", "1000")
    code, document, _ = invoke("census", "--algebra", fixture("free2.json"), "--n", "2", "--q", "2")
    assert code == EXIT_DOMAIN_ERROR
    assert document["payload"]["type"] == "BudgetExceededError"
    code, _, _ = invoke("census", "--algebra", fixture("free2.json"), "--n", "2", "--q", "2", "--budget", "2000")
    assert code == EXIT_OK


def test_fit(invoke):
    _, document, _ = invoke("fit", "--m", "1", "--n", "2", "--primes", "2,3")
    fit = document["payload"]["fit"]
    assert fit["fits"] is True
    assert fit["primes"]["3"] == {"census": 9, "polynomial": 9}


def test_embed(invoke, tmp_path):
    _, document, _ = invoke("embed", "--point", fixture("free2_point.json"))
    assert document["payload"] == {"coordinates": ["0", "0", "1"], "family_size": 3, "power": 1}

    charts = tmp_path / "charts.json"
    charts.write_text(json.dumps([[[1]], [[2]]]))
    _, document, _ = invoke("embed", "--point", fixture("free2_point.json"), "--charts", str(charts))
    assert document["payload"]["coordinates"] == ["0", "1"]


def test_embed_outside_every_chart(invoke, tmp_path):
    charts = tmp_path / "charts.json"
    charts.write_text(json.dumps([[[1]]]))
    code, document, _ = invoke("embed", "--point", fixture("free2_point.json"), "--charts", str(charts))
    assert code == EXIT_DOMAIN_ERROR
    assert document["payload"]["type"] == "NotCoveredError"


def test_tangent(invoke):
    _, document, _ = invoke("tangent", "--point", fixture("commuting_point.json"))
    report = document["payload"]["tangent"]
    assert (report["based_tangent_dim"], report["hom_I_M_dim"], report["status"]) == (8, 4, "truncated")

    _, document, _ = invoke("tangent", "--point", fixture("free2_point.json"))
    assert document["payload"]["tangent"]["hom_I_M_dim"] == 6
    assert document["payload"]["tangent"]["status"] == "exact"


def test_tangent_that_does_not_stabilize(invoke):
    _, document, _ = invoke("tangent", "--point", fixture("commuting_point.json"), "--max-degree", "2")
    assert document["payload"]["tangent"]["status"] == "unstable"
    assert document["diagnostics"]


def test_tangent_reads_max_degree_from_settings(invoke, tmp_path):
    settings = tmp_path / "settings.env"
    settings.write_text("TANGENT_MAX_DEGREE=2\n")
    _, document, _ = invoke("--config", str(settings), "tangent", "--point", fixture("commuting_point.json"))
    assert document["payload"]["tangent"]["status"] == "unstable"


def test_reduce_mod_p(invoke):
    _, document, _ = invoke("reduce-mod-p", "--point", fixture("mod2_point.json"), "--p", "2")
    payload = document["payload"]
    assert payload["is_cyclic"] is False
    assert payload["point"]["algebra"]["field"] == {"kind": "Fp", "p": 2}
    assert payload["point"]["matrices"] == [[[0, 1], [0, 0]]]
    assert document["diagnostics"]

    _, document, _ = invoke("reduce-mod-p", "--point", fixture("mod2_point.json"), "--p", "3")
    assert document["payload"]["is_cyclic"] is True


def test_veronese(invoke):
    _, document, _ = invoke("veronese", "--degrees", "2,3")
    assert document["payload"] == {"bound": 24}


def test_embed_check(invoke):
    _, document, _ = invoke(
        "embed-check", "--algebra", fixture("free2.json"), "--quotient", fixture("commutative2.json"),
        "--n", "2", "--q", "2",
    )
    report = document["payload"]["embedding"]
    assert report["closed_embedding"] is True
    assert (report["orbit_count_a"], report["orbit_count_b"]) == (96, 24)

    code, document, _ = invoke(
        "embed-check", "--algebra", fixture("commutative2.json"), "--quotient", fixture("free2.json"),
        "--n", "2", "--q", "2",
    )
    assert code == EXIT_DOMAIN_ERROR
    assert document["payload"]["type"] == "NotAQuotientError"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["count", "--m", "2"],
        ["count", "--m", "0", "--n", "2"],
        ["veronese", "--degrees", "two,three"],
    ],
)
def test_usage_errors(invoke, argv):
    code, document, _ = invoke(*argv)
    assert code == EXIT_USAGE_ERROR
    assert document["status"] == "error"
    assert document["payload"]["error"]


def test_missing_document(invoke, tmp_path):
    missing = str(tmp_path / "absent.json")
    code, document, _ = invoke("check", "--point", missing)
    assert code == EXIT_DOMAIN_ERROR
    assert document["payload"]["path"] == missing


def test_undecodable_document_is_a_domain_error(invoke, tmp_path):
    path = tmp_path / "algebra.json"
    path.write_bytes(b'{"m": 2, "relations": [], "note": "\xff"}')
    code, document, _ = invoke("census", "--algebra", str(path), "--n", "1", "--q", "2")
    assert code == EXIT_DOMAIN_ERROR
    assert document["payload"]["type"] == "DocumentError"
    assert document["payload"]["path"] == str(path)


def test_malformed_point_reports_a_path(invoke, tmp_path):
    point = json.loads((FIXTURES / "free2_point.json").read_text())
    point["matrices"][1] = [["0", "1"]]
    path = tmp_path / "point.json"
    path.write_text(json.dumps(point))
    code, document, _ = invoke("canon", "--point", str(path))
    assert code == EXIT_DOMAIN_ERROR
    assert document["payload"]["path"] == "$.matrices[1]"
    assert document["payload"]["type"] == "DocumentError"


def test_invalid_point_is_a_domain_error(invoke, tmp_path):
    point = json.loads((FIXTURES / "nilpotent_point.json").read_text())
    point["y"] = ["0", "0"]
    path = tmp_path / "point.json"
    path.write_text(json.dumps(point))
    code, document, _ = invoke("tangent", "--point", str(path))
    assert code == EXIT_DOMAIN_ERROR
    assert document["payload"]["type"] == "InvalidPointError"


def test_missing_settings_file(invoke, tmp_path):
    missing = str(tmp_path / "absent.env")
    code, document, _ = invoke("--config", missing, "count", "--m", "1", "--n", "1")
    assert code == EXIT_DOMAIN_ERROR
    assert document["payload"]["path"] == missing
