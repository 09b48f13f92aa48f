import json
from fractions import Fraction

from pytest import mark, raises

from ans_carry import cli
from ans_carry.cli import EXIT_ERROR, EXIT_OK, EXIT_UNDETERMINED, RunConfig, main
from ans_carry.exception import ParseError


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


def test_cli_estimate(testname: str):
    output = f"output/{testname}.json"
    assert main(["estimate", "--base", "2", "--n", "10000", "--output", output]) == EXIT_OK
    data = json.loads(_read(output))
    assert data["metadata"] == {"command": "estimate", "system": "base=2"}
    assert data["data"]["n"] == 10000
    # scp(N) = 2N - s_2(N)
    assert data["data"]["scp"] == 2 * 10000 - bin(10000).count("1")
    assert data["data"]["theoretical"]["exact"] == "2"


def test_cli_estimate_deterministic(testname: str):
    outputs = [f"output/{testname}-{i}.json" for i in range(2)]
    for output in outputs:
        assert main(["estimate", "--rational", "3/2", "--n", "5000", "--output", output]) == EXIT_OK
    assert _read(outputs[0]) == _read(outputs[1])


def test_cli_estimate_csv(testname: str):
    output = f"output/{testname}.csv"
    assert main(["estimate", "--builtin", "fibonacci", "--n", "1000", "--format", "csv", "--output", output]) == 0
    text = _read(output)
    assert "checkpoint,scp,mean,mean_decimal" in text
    assert "# provenance=a-dev-cp" in text


@mark.parametrize(
    "name,code",
    (
        ("fibonacci", EXIT_OK),
        ("base(3)", EXIT_OK),
        ("k3", EXIT_OK),
        ("K1", EXIT_UNDETERMINED),
        ("chain", EXIT_UNDETERMINED),
    ),
)
def test_cli_analyze(name: str, code: int, testname: str):
    output = f"output/{testname}.json"
    assert main(["analyze", "--builtin", name, "--output", output]) == code
    data = json.loads(_read(output))["data"]
    assert data["verdict"]["status"] == ("exists" if code == EXIT_OK else "undetermined")


def test_cli_analyze_k4(testname: str):
    output = f"output/{testname}.json"
    assert main(["analyze", "--builtin", "k4", "--output", output]) == EXIT_UNDETERMINED
    verdict = json.loads(_read(output))["data"]["verdict"]
    assert "a" in [quotient["witness"] for quotient in verdict["offending"]]
    assert verdict["value"]["exact"] is None


def test_cli_analyze_dfa_file(testname: str):
    path = f"output/{testname}.dfa"
    with open(path, "w") as f:
        f.write("# Zeckendorf\nstates 3\ninitial 0\nalphabet 2\ntrans 0 1 1\ntrans 1 0 2\ntrans 2 1 1\ntrans 2 0 2\n")
    assert main(["analyze", "--dfa", path, "--output", f"output/{testname}.json"]) == EXIT_OK


def test_cli_probe(testname: str):
    output = f"output/{testname}.json"
    args = ["probe", "--builtin-lang", "H", "--sequence", "M", "--levels", "2:10", "--output", output]
    assert main(args) == EXIT_OK
    data = json.loads(_read(output))["data"]
    assert [point["n"] for point in data["probe"]] == [3 * 2**ell - 1 for ell in range(2, 11)]
    assert data["filtered"]["trend"] == "converging"


def test_cli_probe_diverging(testname: str):
    output = f"output/{testname}.csv"
    args = ["probe", "--builtin", "chain", "--sequence", "10 100 1000", "--format", "csv", "--output", output]
    assert main(args) == EXIT_UNDETERMINED
    assert "n,scp,mean,mean_decimal" in _read(output)


def test_cli_measures(testname: str):
    output = f"output/{testname}.csv"
    args = ["measures", "--beta", "1 -1 -1 -1", "--n", "100000", "--k", "20", "--format", "csv", "--output", output]
    assert main(args) == EXIT_OK
    text = _read(output)
    assert "k,g_k,J,weight,nu,cumulative,M_k" in text
    assert "# parry=simple" in text


def test_cli_measures_tolerance(testname: str):
    args = ["measures", "--builtin", "fibonacci", "--n", "1000", "--k", "3", "--tolerance", "1/1000000"]
    assert main([*args, "--output", f"output/{testname}.json"]) == EXIT_UNDETERMINED


def test_cli_estimate_tolerance(testname: str):
    args = ["estimate", "--base", "2", "--n", "1000", "--tolerance", "1/1000000"]
    assert main([*args, "--output", f"output/{testname}.json"]) == EXIT_UNDETERMINED
    args = ["estimate", "--base", "2", "--n", "1024", "--tolerance", "1/100"]
    assert main([*args, "--output", f"output/{testname}.json"]) == EXIT_OK


def test_cli_config(testname: str):
    config = f"output/{testname}.cfg"
    output = f"output/{testname}.json"
    with open(config, "w") as f:
        f.write("# three halves\nrational=3/2\nn=1000\ncheckpoints=10 100\n")
    assert main(["estimate", "--config", config, "--n", "500", "--output", output]) == EXIT_OK
    data = json.loads(_read(output))
    assert data["metadata"]["system"] == "rational=3/2"
    assert data["data"]["n"] == 500
    assert [c["n"] for c in data["data"]["checkpoints"]] == [10, 100, 500]


@mark.parametrize(
    "args",
    (
        ["estimate"],
        ["estimate", "--builtin", "lucas"],
        ["estimate", "--base", "2", "--n", "0"],
        ["estimate", "--dfa", "output/missing.dfa"],
        ["probe", "--base", "2"],
        ["analyze", "--rational", "3/2"],
        ["measures", "--beta", "1 x"],
        ["estimate", "--base", "2", "--tolerance", "x"],
    ),
)
def test_cli_errors(args: list):
    assert main(args) == EXIT_ERROR


@mark.parametrize(
    "args",
    (
        ["estimate", "--base", "2", "--checkpoints", "10 x"],
        ["estimate", "--base", "2", "--tolerance", "1/0"],
        ["probe", "--builtin", "k4", "--sequence", "K4", "--levels", "a:b"],
        ["probe", "--base", "2", "--sequence", "10 y"],
        ["measures", "--beta", "1 -1 -1", "--interval", "1"],
    ),
)
def test_cli_validate_first(args: list, monkeypatch):
    def build(*_):
        raise AssertionError("a system was built before the settings were checked")

    monkeypatch.setattr(cli, "build_source", build)
    monkeypatch.setattr(cli, "build_basis", build)
    assert main(args) == EXIT_ERROR


def test_cli_config_values():
    cfg = RunConfig("probe", base=2, sequence="10, 100", levels="3:5", checkpoints="1 2", tolerance="1/8").validate()
    assert cfg.sequence_points() == [10, 100]
    assert cfg.level_range() == range(3, 6)
    assert cfg.checkpoint_list() == [1, 2]
    assert cfg.tolerance_value() == Fraction(1, 8)
    assert RunConfig("probe", base=2, sequence="M").validate().sequence_points() is None
    with raises(ParseError):
        RunConfig("estimate", base=2, levels="2-16").validate()
