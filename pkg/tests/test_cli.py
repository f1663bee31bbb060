import json

import pytest

from faircount.cli_report import (
    EXIT_OK,
    EXIT_POLICY,
    EXIT_USAGE,
    RunConfig,
    build_report,
    cmd_count,
    cmd_counterexample,
    main,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_report(stdout: str) -> dict:
    # progress lines (selftest) may precede the JSON document
    start = stdout.index("{")
    return json.loads(stdout[start:])


# -- counterexample --------------------------------------------------------------


def test_counterexample_n2(capsys):
    code, out, _ = run_cli(capsys, "counterexample", "--n", "2")
    assert code == EXIT_OK
    rep = parse_report(out)
    assert rep["schema"] == 1
    pl = rep["payload"]
    assert pl["naive_b"]["value"] == "108"
    assert pl["alpha"]["value"] == "148/1"
    assert pl["is_counterexample"] is True


def test_counterexample_n1(capsys):
    code, out, _ = run_cli(capsys, "counterexample", "--n", "1")
    assert code == EXIT_OK
    assert parse_report(out)["payload"]["is_counterexample"] is False


def test_usage_error_on_bad_n(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["counterexample", "--n", "0"])
    assert exc.value.code == EXIT_USAGE


def test_missing_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


# -- count -----------------------------------------------------------------------


def test_count_hom(capsys):
    code, out, _ = run_cli(capsys, "count", "--n", "1", "--x", "90", "--mode", "hom")
    assert code == EXIT_OK
    rows = parse_report(out)["payload"]["rows"]
    assert rows[0]["count"]["value"] == "2322"
    assert rows[0]["count"]["provenance"] == "exact"


def test_count_epi_zero(capsys):
    code, out, _ = run_cli(capsys, "count", "--n", "1", "--x", "3", "--mode", "epi")
    assert code == EXIT_OK
    assert parse_report(out)["payload"]["rows"][0]["count"]["value"] == "0"


def test_count_csv_sweep(capsys):
    code, out, _ = run_cli(
        capsys, "count", "--n", "1", "--x", "3,90", "--format", "csv"
    )
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "n,x,mode,count"
    assert lines[1] == "1,3,hom,54"
    assert lines[2] == "1,90,hom,2322"


def test_count_tuples_dump(tmp_path, capsys):
    dump = tmp_path / "tuples.txt"
    code, out, _ = run_cli(
        capsys,
        "count", "--n", "1", "--x", "3", "--mode", "tuples", "--out", str(dump),
    )
    assert code == EXIT_OK
    lines = dump.read_text().strip().splitlines()
    assert len(lines) == 54
    assert all(":3" in line for line in lines)
    assert parse_report(out)["payload"]["rows"][0]["count"]["value"] == "54"


def test_count_tuples_requires_out(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["count", "--n", "1", "--x", "3", "--mode", "tuples"])
    assert exc.value.code == EXIT_USAGE


def test_count_cap_breach_exit_code(capsys):
    code, _, err = run_cli(
        capsys,
        "count", "--n", "1", "--x", "1000000", "--mode", "tuples",
        "--tuple-cap", "1000", "--out", "/dev/null",
    )
    assert code == EXIT_USAGE
    assert "cap" in err


# -- euler ------------------------------------------------------------------------


def test_euler_c0_metadata(capsys):
    code, out, _ = run_cli(
        capsys, "euler", "--kind", "c0", "--n", "1", "--prime-bound", "10000"
    )
    assert code == EXIT_OK
    res = parse_report(out)["payload"]["result"]
    assert res["truncation_bound"]["value"] == "10000"
    assert float(res["tail_estimate"]["value"]) > 0
    assert res["value"]["provenance"] == "truncated:10000"


def test_euler_mb_even_refusal(capsys):
    code, _, err = run_cli(
        capsys,
        "euler", "--kind", "mb", "--n", "1", "--family", "mixed",
        "--prime-bound", "1000",
    )
    assert code == EXIT_POLICY
    assert "refused" in err


def test_euler_mb_even_override(capsys):
    code, out, _ = run_cli(
        capsys,
        "euler", "--kind", "mb", "--n", "1", "--family", "mixed",
        "--prime-bound", "1000", "--allow-even",
    )
    assert code == EXIT_OK
    assert parse_report(out)["payload"]["result"]["note"] == "UNSUPPORTED_EVEN_ORDER"


def test_euler_tame_mixed_allowed(capsys):
    code, out, _ = run_cli(
        capsys,
        "euler", "--kind", "tame", "--n", "1", "--family", "mixed",
        "--prime-bound", "1000",
    )
    assert code == EXIT_OK
    assert "note" not in parse_report(out)["payload"]["result"]


# -- predict ----------------------------------------------------------------------


def test_predict(capsys):
    code, out, _ = run_cli(
        capsys, "predict", "--n", "1", "--x", "1000000", "--prime-bound", "10000"
    )
    assert code == EXIT_OK
    pl = parse_report(out)["payload"]
    assert float(pl["predicted"]["value"]) > 0
    assert pl["c0"]["tail_estimate"]["provenance"] == "float"


# -- group info ----------------------------------------------------------------------


def test_group_info_roundtrip(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "group-info", "--family", "mixed", "--n", "1")
    assert code == EXIT_OK
    payload = parse_report(out)["payload"]
    assert payload["order"]["value"] == "24"
    assert payload["abelianization_invariants"] == [2, 6]

    path = tmp_path / "group.json"
    path.write_text(json.dumps(payload["descriptor"]))
    code2, out2, _ = run_cli(capsys, "group-info", "--group-file", str(path))
    assert code2 == EXIT_OK
    payload2 = parse_report(out2)["payload"]
    assert payload2["order"] == payload["order"]
    assert payload2["naive_b"] == payload["naive_b"]


# -- determinism ----------------------------------------------------------------------


def test_payload_determinism(capsys):
    reports = []
    for _ in range(2):
        code, out, _ = run_cli(
            capsys, "euler", "--kind", "c0", "--n", "1", "--prime-bound", "5000"
        )
        assert code == EXIT_OK
        rep = parse_report(out)
        rep.pop("elapsed_seconds")
        reports.append(json.dumps(rep, sort_keys=True))
    assert reports[0] == reports[1]


def test_report_roundtrips_through_json():
    cfg = RunConfig(command="counterexample", n=1)
    payload = cmd_counterexample(cfg)
    rep = build_report(cfg, payload, 0.0)
    text = json.dumps(rep, indent=2, sort_keys=True)
    assert json.loads(text) == rep


def test_threads_flag_does_not_change_payload(capsys):
    outs = []
    for threads in ("1", "4"):
        code, out, _ = run_cli(
            capsys, "count", "--n", "1", "--x", "90", "--threads", threads
        )
        assert code == EXIT_OK
        rep = parse_report(out)
        rep.pop("elapsed_seconds")
        rep["config"].pop("threads")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]
