import csv
import io
import json
import math

import pytest

import coulomb_counts.specfun.incgamma as incgamma
from coulomb_counts import cli, scans
from coulomb_counts.errors import ConvergenceError
from coulomb_counts.statistics import SQRT_PI

BULK_COLUMNS = ["a", "E_N", "V_N", "scaled_V", "bulk_prediction", "edge_prediction"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


def test_variance_curve_csv_layout(capsys):
    code, out, _ = run(capsys, "variance-curve", "--ensemble", "product", "--param", "m=3",
                       "--n", "60", "--grid", "0.1:0.9:5")
    assert code == 0
    preamble = [line for line in out.splitlines() if line.startswith("#")]
    assert preamble[0] == "# coulomb-counts variance-curve"
    assert "# ensemble=product" in preamble and "# params=m=3.0" in preamble
    assert "# grid=0.1:0.9:5" in preamble and "# trials=0" in preamble
    header, rows = parse_csv(out)
    assert header == BULK_COLUMNS
    assert len(rows) == 5
    for r in rows:
        assert r[4] == pytest.approx(2 * r[0] / SQRT_PI, rel=1e-15)


def test_mc_columns_appear_only_with_trials(capsys):
    _, out, _ = run(capsys, "variance-curve", "--n", "20", "--grid", "0.3:0.6:2",
                    "--trials", "200", "--seed", "5")
    header, rows = parse_csv(out)
    assert header == BULK_COLUMNS + list(scans.MC_COLUMNS)
    assert all(r[-1] > 0 for r in rows)


def test_csv_is_bit_stable(capsys):
    argv = ["edge-profile", "--ensemble", "mittag_leffler", "--param", "b=1.5",
            "--param", "c=0.5", "--n", "80", "--beta", "4"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_edge_prediction_at_zero(capsys):
    _, out, _ = run(capsys, "edge-profile", "--n", "100", "--grid=-1:1:3")
    header, rows = parse_csv(out)
    assert header == ["S", "a", "V_N", "scaled_V", "prediction"]
    assert rows[1][0] == 0.0
    assert rows[1][4] == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)


def test_weak_edge_uses_its_own_regime(capsys):
    code, out, _ = run(capsys, "edge-profile", "--ensemble", "trunc_weak", "--param", "c=5",
                       "--n", "200", "--grid", "1:10:4")
    assert code == 0
    assert "# regime=weak_edge" in out
    header, rows = parse_csv(out)
    assert all(r[1] == pytest.approx(1 - r[0] / 400) for r in rows)


def test_origin_ginibre_symplectic_limit(capsys):
    _, out, _ = run(capsys, "origin-profile", "--beta", "4", "--n", "50", "--grid", "0.2:2:4")
    header, rows = parse_csv(out)
    assert header == ["T", "a", "E_N", "V_N", "limit_E", "limit_V", "small_T"]
    for r in rows:
        T = r[0]
        assert r[4] == pytest.approx(T * T - 0.25 * -math.expm1(-4 * T * T), rel=1e-13)


def test_json_round_trip(capsys, tmp_path):
    path = tmp_path / "scan.json"
    code, _, _ = run(capsys, "origin-profile", "--ensemble", "mittag_leffler", "--param", "b=1.5",
                     "--param", "c=0.5", "--n", "40", "--format", "json", "--out", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["regime"] == "origin" and doc["config"]["params"] == {"b": 1.5, "c": 0.5}
    curve = scans.origin_curve(cli.make_potential("mittag_leffler", 2, 40, b=1.5, c=0.5), 40,
                               cli.GridSpec.parse("0.1:3:30").values())
    expected = [[rec.extra[c] for c in doc["columns"]] for rec in curve.records]
    assert doc["rows"] == expected


def test_config_file_is_overridden_by_flags(capsys, tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# scan settings\nensemble = trunc_strong\nc_tilde = 0.8\nn = 30\n"
                    "grid = 0.2:0.8:3\nbeta = 4\n")
    _, out, _ = run(capsys, "variance-curve", "--config", str(conf), "--n", "25")
    assert "# N=25" in out and "# beta=4" in out and "# ensemble=trunc_strong" in out
    assert len(parse_csv(out)[1]) == 3


@pytest.mark.parametrize("argv", [
    ["variance-curve", "--grid", "0.5:0.2:4"],
    ["variance-curve", "--grid", "0.1:0.5"],
    ["variance-curve", "--param", "q=1"],
    ["variance-curve", "--ensemble", "wishart"],
    ["variance-curve", "--beta", "3"],
    ["variance-curve", "--trials", "50"],
    ["variance-curve", "--regime", "edge"],
    ["edge-profile", "--ensemble", "trunc_weak", "--regime", "edge"],
    ["origin-profile", "--ensemble", "trunc_weak", "--param", "c=1"],
    ["variance-curve", "--ensemble", "mittag_leffler", "--param", "b=-1"],
    ["edge-profile", "--n", "10", "--grid", "1:20:3"],
    ["variance-curve", "--config", "/nonexistent/run.conf"],
    ["frobnicate"],
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == cli.EXIT_CONFIG


def test_unknown_config_key_exits_two(capsys, tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("colour = blue\n")
    code, _, err = run(capsys, "variance-curve", "--config", str(conf))
    assert code == 2 and "colour" in err


def test_numeric_failure_exits_three(capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise ConvergenceError("series did not converge")

    monkeypatch.setattr(scans, "variance_curve", boom)
    code, _, err = run(capsys, "variance-curve")
    assert code == cli.EXIT_NUMERIC and "numeric failure" in err


def test_verify_quick_passes(capsys, monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")
    code, out, _ = run(capsys, "verify", "--level", "quick")
    assert code == 0
    assert out.count("[PASS]") == 4 and "\033[" not in out


def test_verify_catches_perturbed_constant(capsys, monkeypatch):
    monkeypatch.setattr(incgamma, "HALF_LOG_2PI", incgamma.HALF_LOG_2PI + 1e-6)
    code, out, _ = run(capsys, "verify")
    assert code == cli.EXIT_VERIFY and "[FAIL]" in out


def test_color_only_on_terminals(monkeypatch):
    class Tty(io.StringIO):
        def isatty(self):
            return True

    monkeypatch.delenv("NO_COLOR", raising=False)
    assert cli._use_color(Tty()) and not cli._use_color(io.StringIO())
    monkeypatch.setenv("NO_COLOR", "")
    assert not cli._use_color(Tty())


def test_grid_spec_parsing():
    g = cli.GridSpec.parse("0.01:10:5:log")
    assert g.log and list(g.values()) == pytest.approx([0.01, 0.0562341325, 0.316227766, 1.77827941, 10])
    assert str(g) == "0.01:10.0:5:log"
    for bad in ("1:2:3:cubic", "a:b:c", "0:1:5:log"):
        with pytest.raises(cli.ConfigError):
            cli.GridSpec.parse(bad)
