import csv
import io
import json
import math

import pytest

from dpvote.cli import EXIT_CAP, EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_USAGE, dumps, main
from dpvote.mechanisms import DEFAULT_SEED


@pytest.fixture
def ballots(tmp_path):
    path = tmp_path / "b.txt"
    path.write_text("a>b>c\na>b>c\nb>c>a\n")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_text_and_json(capsys, ballots):
    code, out, _ = run(capsys, "analyze", ballots)
    assert code == EXIT_OK
    assert "Condorcet winner: a" in out and "Condorcet loser: c" in out
    code, out, _ = run(capsys, "analyze", ballots, "--format", "json")
    data = json.loads(out)
    assert data["condorcet_winner"] == "a" and data["condorcet_loser"] == "c"
    assert data["margins"]["b"]["c"] == 3
    assert data["borda"] == {"a": 4, "b": 4, "c": 1}
    code, out, _ = run(capsys, "analyze", ballots, "--format", "csv")
    assert ["margin", "a", "b", "1"] in list(csv.reader(io.StringIO(out)))


def test_run_exact_cwrr(capsys, ballots):
    code, out, _ = run(capsys, "run", "cwrr", "--epsilon", "0.6931471805599453", "--exact", ballots)
    assert code == EXIT_OK
    lot = json.loads(out)
    assert lot == pytest.approx({"a": 0.5, "b": 0.25, "c": 0.25}, abs=1e-15)


def test_run_ln_syntax_and_17_digits(capsys, ballots):
    _, out, _ = run(capsys, "run", "bordaexp", "--epsilon", "ln(2)", ballots)
    # Borda (4, 4, 1): weights 2, 2, 2^(1/4)
    assert '"a": 0.38541533526725524' in out


def test_run_samples_deterministic(capsys, ballots):
    _, first, _ = run(capsys, "run", "mixture", "--epsilon", "1", "--samples", "200", ballots)
    _, second, _ = run(capsys, "run", "mixture", "--epsilon", "1", "--samples", "200", ballots)
    assert first == second
    data = json.loads(first)
    assert data["seed"] == DEFAULT_SEED and sum(data["counts"].values()) == 200
    _, other, _ = run(capsys, "run", "mixture", "--epsilon", "1", "--samples", "200", "--seed", "3", ballots)
    assert json.loads(other)["seed"] == 3


def test_verify_dp_pass(capsys):
    code, out, _ = run(capsys, "verify-dp", "clrr", "--m", "3", "--n", "3", "--epsilon", "1")
    assert code == EXIT_OK
    assert out.startswith("PASS, empirical epsilon = 1.000000000")
    code, out, _ = run(capsys, "verify-dp", "rd-anti", "--m", "3", "--n", "2", "--epsilon", "1", "--format", "json")
    assert json.loads(out)["verdict"] == "PASS"


def test_verify_dp_cap(capsys):
    code, _, err = run(capsys, "verify-dp", "cwrr", "--m", "3", "--n", "8", "--epsilon", "1")
    assert code == EXIT_CAP and "cap" in err


def test_axioms_json_with_witnesses(capsys):
    code, out, _ = run(capsys, "axioms", "mixture", "--m", "3", "--n", "3", "--epsilon", "ln(2)",
                       "--report", "witnesses", "--with-dp")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["alpha"] * data["eta"] == pytest.approx(2.0)
    assert data["empirical_epsilon"] == pytest.approx(math.log(2))
    assert set(data["witnesses"]) == {"alpha", "beta", "gamma", "eta"}


def test_bounds_csv_grid(capsys):
    code, out, _ = run(capsys, "bounds", "--which", "ParetoUpper", "--m", "3", "--n", "2", "--grid", "0.5:1.0:0.5")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 2
    assert float(rows[1]["value"]) == pytest.approx(math.e)
    assert rows[0]["epsilon_suspect"] == "false"


def test_bounds_listed_cell_suspect(capsys):
    _, out, _ = run(capsys, "bounds", "--which", "lower:BordaEXP:alpha", "--m", "3", "--n", "3", "--epsilon", "1")
    assert list(csv.DictReader(io.StringIO(out)))[0]["epsilon_suspect"] == "true"


def test_bounds_three_way_level(capsys):
    _, out, _ = run(capsys, "bounds", "--which", "CwClProduct", "--m", "3", "--n", "3", "--epsilon", "ln(2)",
                    "--level", "2", "--format", "json")
    assert json.loads(out)[0]["value"] == pytest.approx(1.0)


def test_sweep_writes_csv_and_images(capsys, tmp_path):
    out = tmp_path / "fig5.csv"
    svg = tmp_path / "fig5.svg"
    code, _, _ = run(capsys, "sweep", "--figure", "5", "--out", str(out), "--svg", str(svg), "--plot")
    assert code == EXIT_OK
    assert out.read_text().startswith("sweep,epsilon,")
    assert svg.read_text().lstrip().startswith("<?xml")
    assert (tmp_path / "fig5.png").stat().st_size > 0


def test_sweep_bit_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    sa, sb = tmp_path / "a.svg", tmp_path / "b.svg"
    main(["sweep", "--figure", "3", "--out", str(a), "--svg", str(sa)])
    main(["sweep", "--figure", "3", "--out", str(b), "--svg", str(sb)])
    assert a.read_bytes() == b.read_bytes()
    assert sa.read_bytes() == sb.read_bytes()


def test_sweep_spec_file(capsys, tmp_path):
    spec = tmp_path / "s.cfg"
    spec.write_text("# mixture sweep\ntarget = mixture\nm = 3\nepsilon_grid = ln(2)\nomega_grid = 0,0.5,1\n")
    code, out, _ = run(capsys, "sweep", "--spec", str(spec))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 3
    assert float(rows[1]["x_value"]) == pytest.approx(18 / 13)


def test_config_file_flags_win(capsys, tmp_path, ballots):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("epsilon = ln(2)\nformat = text\n")
    _, out, _ = run(capsys, "run", "cwrr", "--config", str(cfg), ballots)
    assert out.splitlines()[0] == "a\t0.5"
    _, out, _ = run(capsys, "run", "cwrr", "--config", str(cfg), "--format", "json", ballots)
    assert json.loads(out)["a"] == pytest.approx(0.5)
    cfg.write_text("bogus = 1\n")
    assert run(capsys, "run", "cwrr", "--config", str(cfg), "--epsilon", "1", ballots)[0] == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ["run", "plurality", "--epsilon", "1", "x"],
    ["run", "cwrr", "--epsilon", "0", "x"],
    ["verify-dp", "cwrr", "--m", "3", "--n", "2"],
    ["bounds", "--which", "Nope", "--epsilon", "1"],
    ["sweep", "--figure", "9"],
    ["frobnicate"],
    [],
])
def test_usage_errors(capsys, argv):
    assert main(argv) == EXIT_USAGE


def test_io_errors(capsys, tmp_path):
    assert main(["analyze", str(tmp_path / "missing.txt")]) == EXIT_IO
    bad = tmp_path / "bad.txt"
    bad.write_text("a>b>c\na>b\n")
    assert main(["analyze", str(bad)]) == EXIT_IO
    assert main(["bounds", "--which", "SdUpper", "--epsilon", "1", "--out", str(tmp_path / "no" / "x.csv")]) == EXIT_IO


def test_every_subcommand_accepts_format(capsys, ballots):
    for fmt in ("json", "csv", "text"):
        assert main(["analyze", ballots, "--format", fmt]) == EXIT_OK
        assert main(["run", "clrr", "--epsilon", "1", ballots, "--format", fmt]) == EXIT_OK
        assert main(["verify-dp", "cwrr", "--m", "2", "--n", "2", "--epsilon", "1", "--format", fmt]) == EXIT_OK
        assert main(["axioms", "cwrr", "--m", "2", "--n", "2", "--epsilon", "1", "--format", fmt]) == EXIT_OK
        assert main(["bounds", "--which", "SdUpper", "--epsilon", "1", "--format", fmt]) == EXIT_OK
        assert main(["sweep", "--figure", "5", "--format", fmt]) == EXIT_OK


def test_selfcheck_exit_code_reflects_results(capsys, monkeypatch):
    from dpvote import acceptance

    ok = acceptance.CriterionResult(1, "fine", True)
    monkeypatch.setattr(acceptance, "run_all", lambda echo=None: [ok])
    assert main(["selfcheck"]) == EXIT_OK
    bad = acceptance.CriterionResult(2, "broken", False, ["detail"])
    monkeypatch.setattr(acceptance, "run_all", lambda echo=None: [ok, bad])
    assert main(["selfcheck", "--format", "json"]) == EXIT_FAIL


def test_dumps_floats():
    assert dumps({"x": 0.1, "y": math.inf, "z": [1, 2]}) == '{\n  "x": 0.10000000000000001,\n  "y": "inf",\n  "z": [1, 2]\n}'
