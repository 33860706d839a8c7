import csv
import io
import json
import math
import subprocess
import sys

import pytest

from ionmodes import cli, evolution
from ionmodes.protocols import Branch, ProtocolReport, ReportInvariantError


def run(*args):
    return cli.main([str(a) for a in args])


def load(path):
    return json.loads(path.read_text())


def test_run_p2(tmp_path):
    out = tmp_path / "p2.json"
    assert run("run", "--protocol", "P2", "--n", 2, "--n-max", 8, "--output", out) == 0
    doc = load(out)
    assert doc["schema_version"] == cli.SCHEMA_VERSION
    probs = [b["probability"] for b in doc["report"]["branches"]]
    assert probs == pytest.approx([0.5, 0.5], abs=1e-12)


def test_run_p4(tmp_path):
    out = tmp_path / "p4.json"
    assert run("run", "--protocol", "P4", "--n-max", 4, "--output", out) == 0
    assert len(load(out)["report"]["truth_table"]) == 8


def test_run_p1_identity(tmp_path):
    out = tmp_path / "p1.json"
    assert run("run", "--protocol", "P1", "--n", 1, "--theta", 0, "--output", out) == 0
    branches = load(out)["report"]["branches"]
    assert len(branches) == 1
    assert branches[0]["distribution"] == [[0, 1, 1.0]]


def test_default_cutoffs():
    ns = cli.make_parser().parse_args(["run", "--protocol", "P3"])
    assert cli.build_config(ns).n_max == 30
    ns = cli.make_parser().parse_args(["run", "--protocol", "P1"])
    assert cli.build_config(ns).n_max == 8


def test_config_file_and_override(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# entangled number state\nprotocol = P2\nn = 3\nn_max = 6\ntheta = pi/8\n")
    ns = cli.make_parser().parse_args(["run", "--config", str(conf), "--n", "4"])
    cfg = cli.build_config(ns)
    assert (cfg.protocol, cfg.n, cfg.n_max) == ("P2", 4, 6)
    assert cfg.theta == pytest.approx(math.pi / 8)


def test_config_unknown_key(tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text("protocol = P2\ncolour = blue\n")
    assert run("run", "--config", conf) == cli.EXIT_CONFIG
    assert "unknown key 'colour'" in capsys.readouterr().err


def test_config_bad_value(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("n_max = eight\n")
    assert run("run", "--config", conf) == cli.EXIT_CONFIG


def test_bad_flag_exits_with_config_code():
    with pytest.raises(SystemExit) as info:
        run("run", "--protocol", "P9")
    assert info.value.code == 2


def test_truncation_exit(tmp_path, capsys):
    code = run("run", "--protocol", "P3", "--alpha-re", 3, "--n-max", 8, "--output", tmp_path / "x.json")
    assert code == cli.EXIT_TRUNCATION
    assert "truncation" in capsys.readouterr().err


def test_invariant_exit(monkeypatch, tmp_path):
    bad = ProtocolReport("P2", {}, [Branch("down", 0.7), Branch("up", 0.7)], [])
    monkeypatch.setattr(cli, "execute", lambda cfg, **kw: bad)
    assert run("run", "--protocol", "P2", "--output", tmp_path / "x.json") == cli.EXIT_INVARIANT


def test_schema_rejects_out_of_range():
    cfg = cli.RunConfig(protocol="P2").resolved()
    doc = cli.report_document(cfg, cli.execute(cfg))
    cli.validate_document(doc)
    doc["report"]["branches"][0]["probability"] = 1.5
    with pytest.raises(ReportInvariantError):
        cli.validate_document(doc)
    del doc["schema_version"]
    with pytest.raises(ReportInvariantError):
        cli.validate_document(doc)


@pytest.mark.parametrize(
    "extra",
    [
        ["--protocol", "P2", "--n", 3],
        ["--protocol", "P1", "--n", 2, "--theta", "pi/3", "--mode", "sample", "--seed", 5],
        ["--protocol", "P3a", "--alpha-re", 1, "--beta-re", 0.5, "--mode", "sample", "--seed", 11],
        ["--protocol", "P4", "--n-max", 4],
    ],
)
def test_byte_identical_outputs(tmp_path, extra):
    paths = []
    for k in range(2):
        out, table = tmp_path / f"r{k}.json", tmp_path / f"t{k}.csv"
        assert run("run", *extra, "--output", out, "--table", table) == 0
        paths.append((out.read_bytes(), table.read_bytes()))
    assert paths[0] == paths[1]


def test_sample_mode_records_counts(tmp_path):
    out = tmp_path / "s.json"
    assert run("run", "--protocol", "P2", "--n", 2, "--mode", "sample", "--shots", 4000, "--seed", 3, "--output", out) == 0
    samples = load(out)["samples"]
    assert samples["counts"]["down"] + samples["counts"]["up"] == 4000
    assert samples["counts"]["down"] / 4000 == pytest.approx(0.5, abs=0.03)


def test_sample_mode_rejected_for_p4():
    assert run("run", "--protocol", "P4", "--mode", "sample") == cli.EXIT_CONFIG


def test_distribution_table(tmp_path):
    table = tmp_path / "t.csv"
    assert run("run", "--protocol", "P2", "--n", 1, "--n-max", 2, "--output", tmp_path / "r.json", "--table", table) == 0
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 2 * 9
    by = {(r["outcome"], r["m"], r["n"]): r for r in rows}
    assert float(by["down", "1", "0"]["amp_im"]) == pytest.approx(-1 / math.sqrt(2))
    assert float(by["down", "0", "1"]["amp_re"]) == pytest.approx(1 / math.sqrt(2))


def _sweep(tmp_path, *args):
    out = tmp_path / "sweep.csv"
    assert run("sweep", *args, "--output", out) == 0
    return list(csv.DictReader(out.open()))


def test_sweep_p1_theta(tmp_path):
    rows = _sweep(tmp_path, "--protocol", "P1", "--n", 2, "--points", 9)
    assert [float(r["param"]) for r in rows] == pytest.approx([k * math.pi / 8 for k in range(9)])
    for r in rows:
        t = float(r["param"])
        # P(down) = (1 + <0,2|U(2t)|0,2>)/2 with <0,2|U(x)|0,2> = cos^2 x
        assert float(r["p_down"]) == pytest.approx((1 + math.cos(2 * t) ** 2) / 2, abs=1e-12)
        assert float(r["p_down"]) + float(r["p_up"]) == pytest.approx(1, abs=1e-12)


def test_sweep_p2_entropy_at_quarter(tmp_path):
    for n in range(1, 5):
        rows = _sweep(tmp_path, "--protocol", "P2", "--n", n, "--points", 3, "--min", 0, "--max", "pi/2")
        mid = rows[1]
        assert float(mid["param"]) == pytest.approx(math.pi / 4)
        assert float(mid["entropy_down"]) == pytest.approx(1, abs=1e-10)
        assert float(mid["entropy_up"]) == pytest.approx(1, abs=1e-10)


def test_sweep_alpha_parallel_matches_serial(tmp_path):
    args = ("--protocol", "P3", "--variant", "half", "--axis", "alpha", "--points", 4, "--max", 1.2)
    serial = _sweep(tmp_path, *args)
    parallel = _sweep(tmp_path, *args, "--jobs", 3)
    assert serial == parallel
    for r in serial:
        # beta stays at its default of 1
        a2 = float(r["param"]) ** 2 + 1
        assert float(r["p_down"]) == pytest.approx((1 + math.exp(-2 * a2)) / 2, abs=1e-12)


@pytest.mark.parametrize(
    "args",
    [
        ["--protocol", "P1", "--points", 1],
        ["--protocol", "P4"],
        ["--protocol", "P1", "--axis", "alpha"],
    ],
)
def test_sweep_rejections(args):
    assert run("sweep", *args) == cli.EXIT_CONFIG


def test_selftest_passes():
    buf = io.StringIO()
    assert cli.cmd_selftest((4, 6), out=buf) == 0
    text = buf.getvalue()
    assert "oracle-equivalence" in text and "all checks passed" in text


def test_selftest_catches_sign_flip(monkeypatch):
    original = evolution.beam_splitter_matrix
    monkeypatch.setattr(evolution, "beam_splitter_matrix", lambda theta, n_max: original(-theta, n_max))
    buf = io.StringIO()
    assert cli.cmd_selftest((4,), out=buf) == cli.EXIT_SELFTEST
    assert "FAILED: oracle-equivalence" in buf.getvalue()


@pytest.mark.parametrize("raw,value", [("0.5", 0.5), ("pi", math.pi), ("pi/4", math.pi / 4),
                                       ("3*pi/8", 3 * math.pi / 8), ("-pi/2", -math.pi / 2)])
def test_eval_angle(raw, value):
    assert cli.eval_angle(raw) == pytest.approx(value)


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.json"
    proc = subprocess.run(
        [sys.executable, "-m", "ionmodes", "run", "--protocol", "P4", "--n-max", "3", "--output", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert load(out)["report"]["protocol_id"] == "P4"
