"""End-to-end command line checks: argument handling, output formats,
caching, checkpointing, and exit codes."""

import json
import shutil
import subprocess
import sys

import pytest

from etaq import modular, qseries
from etaq.cli import RunConfig, build_config, main, parse_range
from etaq.errors import UsageError


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- argument plumbing ---


def test_parse_range():
    assert parse_range("4") == [4]
    assert parse_range("4..6") == [4, 5, 6]
    assert parse_range("4,7..8,2") == [2, 4, 7, 8]
    assert parse_range("4,4") == [4]


@pytest.mark.parametrize("bad", ["", "x", "1..x", "6..4", ","])
def test_parse_range_rejects(bad):
    with pytest.raises(UsageError):
        parse_range(bad)


def test_config_round_trip(tmp_path):
    config, dump = build_config(
        ["expand", "--a", "4", "--b", "5", "--c", "3", "--terms", "50",
         "--seed", "9", "--jobs", "2", "--dump-config", str(tmp_path / "cfg.json")]
    )
    assert dump == str(tmp_path / "cfg.json")
    config.save(dump)
    assert RunConfig.load(dump) == config


def test_config_validation():
    with pytest.raises(UsageError):
        RunConfig("no-such", {})
    with pytest.raises(UsageError):
        RunConfig("expand", {}, format="xml")
    with pytest.raises(UsageError):
        RunConfig("expand", {}, jobs=0)
    with pytest.raises(UsageError):
        RunConfig("expand", {}, factor_budget=0)


def test_usage_exit_codes(capsys):
    code, _, err = run_cli(["no-such-command"], capsys)
    assert code == 1 and json.loads(err)["error"] == "usage"
    code, _, err = run_cli(["expand", "--a", "4", "--b", "5", "--c", "3"], capsys)
    assert code == 1
    code, _, err = run_cli(["s-search"], capsys)
    assert code == 1


# --- expand and the series cache ---


def test_expand_matches_library(capsys):
    code, out, _ = run_cli(
        ["expand", "--a", "4", "--b", "5", "--c", "3", "--terms", "100"], capsys
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["r"] == 27
    normalized = qseries.normalized_coefficients(4, 5, 3, 4)
    assert payload["coefficients"] == [
        [24 * m + 27, normalized[m]] for m in range(4) if normalized[m]
    ]


def test_expand_cache_transparent(tmp_path, capsys):
    argv = ["expand", "--a", "4", "--b", "7", "--c", "2", "--terms", "80",
            "--cache-dir", str(tmp_path)]
    code1, out1, _ = run_cli(argv, capsys)
    cache_file = tmp_path / "qseries_expand_a4_b7_c2_T80.tsv"
    assert code1 == 0 and cache_file.exists()
    assert cache_file.read_text().startswith("# T=80\n")
    code2, out2, _ = run_cli(argv, capsys)
    assert (code2, out2) == (code1, out1)


def test_expand_cache_dir_from_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("ETAQ_CACHE_DIR", str(tmp_path))
    code, _, _ = run_cli(
        ["expand", "--a", "1", "--b", "3", "--c", "1", "--terms", "40"], capsys
    )
    assert code == 0
    assert (tmp_path / "qseries_expand_a1_b3_c1_T40.tsv").exists()


def test_expand_tsv_projection(capsys):
    code, out, _ = run_cli(
        ["expand", "--a", "4", "--b", "5", "--c", "3", "--terms", "100",
         "--format", "tsv"], capsys
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "exponent\tcoefficient"
    assert lines[1].split("\t") == ["27", "1"]


# --- metadata ---


def test_meta_record(capsys):
    code, out, _ = run_cli(["meta", "--a", "4", "--b", "5", "--c", "3"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["r"] == 27
    assert payload["weight"] == "2"
    assert payload["optimal_level"] == 2304
    assert payload["classification"] == "cuspidal"
    triple = modular.EtaTriple(4, 5, 3)
    assert payload["character_D"] == modular.triple_character(triple).numerator
    assert payload["level"] == triple.level
    ys = [y for y, _ in payload["cusp_orders"]]
    assert ys == sorted(ys) and 1 in ys and triple.level in ys


def test_meta_even_b_has_no_character(capsys):
    code, out, _ = run_cli(["meta", "--a", "4", "--b", "4", "--c", "3"], capsys)
    assert code == 0
    assert json.loads(out)["character_D"] is None


# --- density ---


def test_density_rows_and_figure(tmp_path, capsys):
    out_path = tmp_path / "density.json"
    code, _, _ = run_cli(
        ["density", "--a", "4", "--b", "5", "--c", "3", "--bound", "1000",
         "--decades", "3", "--out", str(out_path)], capsys
    )
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert [(r["bound"], r["nonzero"]) for r in payload["rows"]] == [
        (10, 0), (100, 4), (1000, 36)
    ]
    figure = tmp_path / "density.png"
    assert payload["figure"] == str(figure)
    assert figure.exists() and figure.stat().st_size > 0


def test_density_csv_stdout(capsys):
    code, out, _ = run_cli(
        ["density", "--a", "4", "--b", "5", "--c", "3", "--bound", "100",
         "--decades", "2", "--format", "csv"], capsys
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "a,b,c,bound,nonzero,fraction"
    assert lines[1].startswith("4,5,3,10,0,")


# --- cores ---


def test_cores_counts(capsys):
    code, out, _ = run_cli(["cores", "--a", "5", "--max-m", "8"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert [r["count"] for r in payload["rows"]] == [1, 1, 2, 3, 5, 2, 6, 5, 7]


def test_cores_verify_budget_exhaustion(monkeypatch, capsys):
    monkeypatch.setenv("ETAQ_PARTITION_BUDGET", "5")
    code, out, _ = run_cli(["cores", "--a", "4", "--max-m", "30", "--verify"], capsys)
    assert code == 3
    payload = json.loads(out)
    assert payload["partial"] is True
    assert len(payload["rows"]) < 31
    assert all(r["verified"] for r in payload["rows"])


# --- verify ---


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--identity", "euler", "--terms", "300"],
        ["verify", "--identity", "jacobi", "--terms", "200"],
        ["verify", "--identity", "nekrasov-okounkov", "--terms", "12", "--b", "3"],
        ["verify", "--identity", "han", "--terms", "12",
         "--a", "2", "--b", "4", "--c", "3"],
    ],
)
def test_verify_identities_pass(argv, capsys):
    code, out, _ = run_cli(argv, capsys)
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_verify_han_seeded_trials(capsys):
    argv = ["verify", "--identity", "han", "--terms", "10", "--samples", "3",
            "--seed", "7"]
    code1, out1, _ = run_cli(argv, capsys)
    code2, out2, _ = run_cli(argv, capsys)
    assert code1 == code2 == 0 and out1 == out2
    payload = json.loads(out1)
    assert len(payload["checks"]) == 3
    for check in payload["checks"]:
        p = check["params"]
        assert 1 <= p["a"] <= 3 and 1 <= p["c"] <= 3
        assert p["b"] in (p["a"], p["a"] + 2, p["a"] + 4)


def test_verify_han_incomplete_args(capsys):
    code, _, err = run_cli(
        ["verify", "--identity", "han", "--terms", "10", "--a", "2"], capsys
    )
    assert code == 1 and json.loads(err)["error"] == "usage"


# --- s-search ---


def test_s_search_direct_and_derived(capsys):
    code, out, _ = run_cli(["s-search", "--a-prime", "6"], capsys)
    assert code == 0 and json.loads(out)["s"] == 23
    code, out, _ = run_cli(["s-search", "--a", "5", "--c", "1"], capsys)
    payload = json.loads(out)
    assert code == 0 and payload["a_prime"] == 30 and payload["s"] == 71
    assert payload["certificate"] == [[2, -1], [3, -1], [5, -1]]


def test_s_search_exhaustion_is_a_value(capsys):
    code, out, _ = run_cli(["s-search", "--a-prime", "30", "--limit", "25"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["s"] is None and payload["limit"] == 25


def test_s_search_factor_budget_env(monkeypatch, capsys):
    monkeypatch.setenv("ETAQ_FACTOR_BUDGET", "10")
    code, _, err = run_cli(["s-search", "--a", "5", "--c", "10007"], capsys)
    assert code == 3
    assert json.loads(err)["error"] == "resource-limit"


# --- hecke-test ---


def test_hecke_test_witness(capsys):
    code, out, _ = run_cli(
        ["hecke-test", "--a", "5", "--b", "9", "--c", "2", "--p", "71"], capsys
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["m0"] == 21 and payload["witness"] == -10
    assert payload["eliminated"] is True


def test_hecke_test_preconditions(capsys):
    code, _, err = run_cli(
        ["hecke-test", "--a", "4", "--b", "3", "--c", "1", "--p", "23"], capsys
    )
    assert code == 2
    record = json.loads(err)
    assert record["error"] == "precondition"
    assert "lacunary" in record["message"]
    code, _, err = run_cli(
        ["hecke-test", "--a", "4", "--b", "5", "--c", "3", "--p", "29"], capsys
    )
    assert code == 2


# --- interpolate ---


def test_interpolate_output(capsys):
    code, out, _ = run_cli(["interpolate", "--a", "4", "--c", "1", "--m", "4"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["coefficients"] == ["5", "-1"]
    assert payload["degree_bound"] == 1
    assert payload["odd_positive_roots"] == [5]


def test_interpolate_csv_row(capsys):
    code, out, _ = run_cli(
        ["interpolate", "--a", "4", "--c", "1", "--m", "4", "--format", "csv"], capsys
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "a,c,m,degree_bound,coefficients,odd_positive_roots"
    assert lines[1] == "4,1,4,1,5 -1,5"


# --- classify ---


def test_classify_box_and_formats(tmp_path, capsys):
    argv = ["classify", "--a", "4", "--c", "2..3", "--hecke-rounds", "2"]
    code1, out1, _ = run_cli(argv, capsys)
    code2, out2, _ = run_cli(argv, capsys)
    assert code1 == code2 == 0 and out1 == out2
    payload = json.loads(out1)
    assert payload["survivors"] == [[4, 5, 3]]
    assert payload["complete"] is True

    code, out, _ = run_cli(argv + ["--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("a,b,c,status,")
    assert any(",survivor," in line for line in lines[1:])


def test_classify_checkpoint_and_resume(tmp_path, capsys):
    ckpt = tmp_path / "run.ckpt"
    code, _, _ = run_cli(
        ["classify", "--a", "4", "--c", "2", "--checkpoint", str(ckpt)], capsys
    )
    assert code == 0
    assert json.loads(ckpt.read_text()) == [[4, 2]]
    shard_lines = (tmp_path / "run.ckpt.shards.jsonl").read_text().splitlines()
    assert len(shard_lines) == 1

    code, resumed, _ = run_cli(
        ["classify", "--a", "4", "--c", "2..3", "--checkpoint", str(ckpt),
         "--resume"], capsys
    )
    assert code == 0
    assert sorted(json.loads(ckpt.read_text())) == [[4, 2], [4, 3]]
    code, fresh, _ = run_cli(["classify", "--a", "4", "--c", "2..3"], capsys)
    assert code == 0 and resumed == fresh


def test_classify_resume_requires_checkpoint(capsys):
    code, _, err = run_cli(["classify", "--a", "4", "--c", "2", "--resume"], capsys)
    assert code == 1 and json.loads(err)["error"] == "usage"


def test_classify_partial_exit(tmp_path, capsys):
    out_path = tmp_path / "partial.json"
    code, _, _ = run_cli(
        ["classify", "--a", "4", "--c", "5", "--s-limit", "25",
         "--out", str(out_path)], capsys
    )
    assert code == 3
    payload = json.loads(out_path.read_text())
    assert payload["partial"] is True and payload["complete"] is False
    assert (tmp_path / "partial.png").exists()


def test_classify_figure_rendered(tmp_path, capsys):
    out_path = tmp_path / "cls.json"
    code, _, _ = run_cli(
        ["classify", "--a", "4", "--c", "3", "--out", str(out_path)], capsys
    )
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["figure"] == str(tmp_path / "cls.png")
    assert (tmp_path / "cls.png").stat().st_size > 0


# --- out-file equivalence and the console script ---


def test_out_file_matches_stdout(tmp_path, capsys):
    argv = ["meta", "--a", "4", "--b", "5", "--c", "3"]
    _, out, _ = run_cli(argv, capsys)
    path = tmp_path / "meta.json"
    run_cli(argv + ["--out", str(path)], capsys)
    assert path.read_text() == out


def test_console_script_entry_point():
    exe = shutil.which("etaq")
    if exe is None:
        cmd = [sys.executable, "-m", "etaq.cli"]
    else:
        cmd = [exe]
    proc = subprocess.run(
        cmd + ["expand", "--a", "1", "--b", "3", "--c", "1", "--terms", "30"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["r"] == 2
