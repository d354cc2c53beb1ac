"""Config parsing and the command-line surface."""

import json

import pytest

from viscoshear.cli import main
from viscoshear.config import parse_config
from viscoshear.errors import ParseError, ValidationError
from viscoshear.report import csv_text, fmt_float, json_text, svg_line_plot


def test_parse_smoke_defaults():
    cfg = parse_config("gamma0 = 0.15\ngamma1 = 0.06\ngamma2 = 0.45\nnu = 1e-3")
    assert cfg.gamma0 == 0.15
    assert cfg.n_points == 8193
    assert cfg.formats == ("csv", "json")


def test_parse_comments_and_blank_lines():
    cfg = parse_config("# header\n\ngamma1 = 0.02  # inline\nM = 0.5\n")
    assert cfg.gamma1 == 0.02
    assert cfg.M == 0.5


def test_parse_rejects_gamma2_out_of_range():
    with pytest.raises(ValidationError, match=r"gamma2 must lie in \(0,1\)"):
        parse_config("gamma2 = 1.5")


def test_parse_rejects_even_n_points():
    with pytest.raises(ValidationError, match="n_points must be odd"):
        parse_config("n_points = 4096")


def test_parse_rejects_unknown_and_duplicate_keys():
    with pytest.raises(ParseError, match="line 2.*unknown key"):
        parse_config("gamma0 = 0.1\nbogus = 3\n")
    with pytest.raises(ParseError, match="line 2.*duplicate"):
        parse_config("gamma0 = 0.1\ngamma0 = 0.2\n")
    with pytest.raises(ParseError, match="line 1"):
        parse_config("gamma0 0.1")


def test_parse_gamma_ratio_knob():
    with pytest.raises(ValidationError, match="gamma_ratio_max"):
        parse_config("gamma1 = 0.2\ngamma2 = 0.5\n")
    cfg = parse_config("gamma1 = 0.2\ngamma2 = 0.5\ngamma_ratio_max = 0.5\n")
    assert cfg.gamma1 == 0.2


def test_parse_formats_and_k_grid():
    cfg = parse_config("formats = csv , svg\nk_grid = 0.9:1.0:5\n")
    assert cfg.formats == ("csv", "svg")
    assert list(cfg.k_grid_values(0.0)) == pytest.approx([0.9, 0.925, 0.95, 0.975, 1.0])
    with pytest.raises(ValidationError, match="k_grid"):
        parse_config("k_grid = 1:2\n")
    with pytest.raises(ValidationError, match="formats"):
        parse_config("formats = yaml\n")


def test_fmt_float_roundtrip():
    for x in (0.1, -1.9801980198019802, 5.451168525449677e-4, 1e-300):
        assert float(fmt_float(x)) == x
    assert fmt_float(float("nan")) == "NA"


def test_csv_and_json_writers():
    text = csv_text(("a", "b"), [(1.0, None), (0.5, "x")])
    assert text == "a,b\n1,NA\n0.5,x\n"
    payload = {"v": [1.5, None], "ok": True, "name": "r"}
    assert json_text(payload) == '{"v": [1.5, null], "ok": true, "name": "r"}\n'


def test_svg_is_deterministic():
    series = [("c", [0.0, 1.0, 2.0], [0.1, 0.4, 0.2])]
    a = svg_line_plot(series, "x", "y", "t")
    b = svg_line_plot(series, "x", "y", "t")
    assert a == b and a.startswith("<svg")


COUETTE_CFG = "gamma0 = 0.15\ngamma1 = 0.03\ngamma2 = 0.8\nnu = 1e-3\nM = 0\nn_times = 8\n"


def test_cli_kstar_sweep_couette(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(COUETTE_CFG)
    out = tmp_path / "out"
    rc = main(["kstar-sweep", "--config", str(cfg), "--out", str(out), "--format", "csv,json"])
    assert rc == 0
    lines = (out / "kstar_curve.csv").read_text().splitlines()
    assert lines[0] == "t,kstar,lambda1,lambda2"
    assert all(line.split(",")[1] == "NA" for line in lines[1:])
    payload = json.loads((out / "kstar_curve.json").read_text())
    assert payload["Ttilde"] is None


def test_cli_rerun_is_byte_identical(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(COUETTE_CFG)
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        assert main(["kstar-sweep", "--config", str(cfg), "--out", str(out)]) == 0
        outs.append((out / "kstar_curve.csv").read_bytes())
    assert outs[0] == outs[1]


def test_cli_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("gamma2 = 1.5\n")
    assert main(["kstar-sweep", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert main(["kstar-sweep", "--config", str(tmp_path / "missing.cfg")]) == 2
    ok = tmp_path / "ok.cfg"
    ok.write_text(COUETTE_CFG)
    assert main(["kstar-sweep", "--config", str(ok), "--format", "yaml"]) == 2
    assert main(["bogus-subcommand", "--config", str(ok)]) == 2


def test_cli_calibrate_prints_M(tmp_path, capsys):
    cfg = tmp_path / "ref.cfg"
    cfg.write_text("gamma0 = 0.15\ngamma1 = 0.03\ngamma2 = 0.8\nnu = 1e-3\n")
    rc = main(["calibrate", "--config", str(cfg), "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert rc == 0
    m_line = [l for l in out.splitlines() if l.startswith("M = ")][0]
    assert 0.700 <= float(m_line.split("=")[1]) <= 0.704


def test_worker_cap_does_not_change_results(tmp_path, monkeypatch):
    from viscoshear.calibrate import kstar_time_sweep
    from viscoshear.flow import FlowParams

    p = FlowParams(0.0, 0.15, 0.03, 0.8, 1e-3)
    serial = kstar_time_sweep(0.0, p, 8)
    monkeypatch.setenv("VISCOSHEAR_THREADS", "3")
    threaded = kstar_time_sweep(0.0, p, 8)
    assert list(serial.lambda1s) == list(threaded.lambda1s)
    assert serial.kstars == threaded.kstars
