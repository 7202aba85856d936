import pytest

from helpers import bot_family, top_family
from mlst.cli import EXIT_DATA, EXIT_GUARD, EXIT_OK, EXIT_USAGE, main
from mlst.graph import MlstInstance, WeightedGraph
from mlst.io import dump, load


@pytest.fixture
def top_file(tmp_path):
    path = tmp_path / "top.mlst"
    dump(top_family(4), path)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.mlst", tmp_path / "b.mlst"
    for p in (a, b):
        assert run(capsys, "gen", "--model", "ba", "--n", "25", "--ell", "3", "--seed", "7", "--out", p)[0] == 0
    assert a.read_text() == b.read_text()
    assert load(a).levels == 3


def test_solve_and_oracle(top_file, capsys):
    code, out, _ = run(capsys, "solve", top_file, "--algo", "td", "--mode", "exact")
    assert code == EXIT_OK
    assert "cost 10" in out.splitlines() and "level 2 0-4" in out.splitlines()
    code, out, _ = run(capsys, "solve", top_file, "--algo", "cmps", "--mode", "exact")
    assert "cost 8" in out.splitlines() and "subset {1}" in out.splitlines()
    code, out, _ = run(capsys, "solve", top_file, "--algo", "cmpq", "--q", "1,2", "--mode", "exact")
    assert "cost 10" in out.splitlines()
    code, out, _ = run(capsys, "oracle", top_file)
    assert code == EXIT_OK and out.splitlines()[0] == "opt 8"


def test_ratio_commands(tmp_path, capsys):
    code, out, _ = run(capsys, "ratio", "--ell", "3", "--method", "full")
    assert code == EXIT_OK and "t 1.5000000000" in out.splitlines()
    table = tmp_path / "t.csv"
    assert run(capsys, "ratio", "--ell", "4", "--table", "--out", table)[0] == EXIT_OK
    lines = table.read_text().splitlines()
    assert lines[0] == "ell,t_ell,iterations" and lines[2].startswith("2,1.333333,")


def test_emit_ilp(top_file, tmp_path, capsys):
    for form in ("cut", "mcf", "scf", "reduced"):
        out = tmp_path / f"{form}.lp"
        assert run(capsys, "emit-ilp", top_file, "--form", form, "--out", out)[0] == EXIT_OK
        assert out.read_text().splitlines()[0] == f"\\ model: mlst_{form}"


def test_experiment_and_aggregate(tmp_path, capsys):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("models = er\nn = 12\nell = 2\ntsm = linear\nreps = 2\n")
    out = tmp_path / "rows.csv"
    code, _, err = run(capsys, "experiment", "--config", cfg, "--out", out, "--set", "reps=1")
    assert code == EXIT_OK and "4 rows" in err
    code, summary, _ = run(capsys, "aggregate", out, "--by", "algo")
    assert code == EXIT_OK
    assert summary.splitlines()[0] == "algo,count,min,q1,median,q3,max,mean"
    assert len(summary.splitlines()) == 5


@pytest.mark.parametrize("argv", [
    [], ["nope"], ["solve"], ["ratio"], ["ratio", "--ell", "0"], ["ratio", "--ell", "x"],
    ["solve", "{top}", "--algo", "cmpq"], ["solve", "{top}", "--algo", "cmpq", "--q", "2,3"],
    ["experiment", "--out", "x.csv", "--set", "reps"], ["aggregate", "{csv}", "--by", ","],
])
def test_usage_errors(argv, top_file, tmp_path, capsys):
    csv = tmp_path / "r.csv"
    csv.write_text("ratio\n1\n")
    argv = [a.format(top=top_file, csv=csv) for a in argv]
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_guard_errors(tmp_path, capsys):
    big = tmp_path / "big.mlst"
    n = 12
    g = WeightedGraph.from_edges(n, [(i, (i + 1) % n, 1) for i in range(n)])
    dump(MlstInstance.create(g, [range(n)]), big)
    assert run(capsys, "oracle", big)[0] == EXIT_GUARD
    assert run(capsys, "ratio", "--ell", "20", "--method", "full")[0] == EXIT_GUARD
    many = tmp_path / "many.mlst"
    dump(MlstInstance.create(g, [range(n)] * 17), many)
    assert run(capsys, "solve", many, "--algo", "cmp")[0] == EXIT_GUARD
    wide = tmp_path / "wide.mlst"
    n = 22
    g = WeightedGraph.from_edges(n, [(i, (i + 1) % n, 1) for i in range(n)])
    dump(MlstInstance.create(g, [range(0, n, 1)]), wide)
    assert run(capsys, "emit-ilp", wide, "--form", "cut")[0] == EXIT_GUARD
    sparse = tmp_path / "sparse.mlst"
    dump(MlstInstance.create(g, [range(0, 20)]), sparse)
    assert run(capsys, "solve", sparse, "--algo", "bu", "--mode", "exact")[0] == EXIT_GUARD


def test_data_errors(tmp_path, capsys):
    bad = tmp_path / "bad.mlst"
    bad.write_text("mlst 1\nn 2 m 1 l 1\ne 0 1 -4\nt 1 2 0 1\n")
    assert run(capsys, "solve", bad)[0] == EXIT_DATA
    assert run(capsys, "oracle", tmp_path / "missing.mlst")[0] == EXIT_DATA
    assert run(capsys, "gen", "--model", "ws", "--n", "6", "--K", "6")[0] == EXIT_DATA
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("models = geo\n")
    assert run(capsys, "experiment", "--config", cfg, "--out", tmp_path / "o.csv")[0] == EXIT_DATA
    junk = tmp_path / "junk.csv"
    junk.write_text("a,b\n1,2\n")
    assert run(capsys, "aggregate", junk, "--by", "a")[0] == EXIT_DATA


def test_bot_figure_through_cli(tmp_path, capsys):
    path = tmp_path / "bot.mlst"
    dump(bot_family(4), path)
    out = run(capsys, "solve", path, "--algo", "bu", "--mode", "exact")[1]
    assert "cost 8" in out.splitlines()
    assert run(capsys, "oracle", path)[1].splitlines()[0] == "opt 6"
