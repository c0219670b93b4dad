import math
import subprocess
import sys

import pytest

from qmonitor import io
from qmonitor.cli import main
from qmonitor.config import PRESETS, SCHEMA, RunConfig, default_out_dir, parse_file, parse_text
from qmonitor.core import ConfigError


def test_fmt():
    assert io.fmt(3) == "3"
    assert io.fmt(0.1) == "0.1"
    assert io.fmt(1 / 3) == "0.333333333333"
    assert io.fmt(float("nan")) == "nan"
    assert io.fmt(True) == "1"


def test_csv_round_trip(tmp_path):
    path = io.write_csv(tmp_path / "sub" / "t.csv", ["a", "b"], [(1, 0.5), (2, math.pi)])
    assert path.read_text() == "a,b\n1,0.5\n2,3.14159265359\n"
    header, rows = io.read_csv(path)
    assert header == ["a", "b"] and rows[1] == [2.0, 3.14159265359]


def test_svg_chart(tmp_path):
    series = [("a<b", [0, 1, 2, 3], [1.0, float("nan"), 2.0, 3.0]), ("flat", [0, 3], [2.0, 2.0])]
    text = io.write_line_chart(tmp_path / "c.svg", "T & title", "x", "y", series, markers=True).read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert text.count("<polyline") == 3
    assert "a&lt;b" in text and "T &amp; title" in text
    assert text.count("<circle") == 5
    with pytest.raises(ValueError):
        io.write_line_chart(tmp_path / "d.svg", "t", "x", "y", [("s", [0], [float("nan")])])


def test_parse_text():
    values = parse_text("# comment\n\noscillator.m = 2\nengine=analytic\n")
    assert values == {"oscillator.m": "2", "engine": "analytic"}
    with pytest.raises(ConfigError, match="2"):
        parse_text("oscillator.m=1\nnot a pair")
    with pytest.raises(ConfigError, match="unknown"):
        parse_text("oscillator.mass=1")
    with pytest.raises(ConfigError):
        parse_file("/nonexistent/config.txt")


def test_precedence():
    assert RunConfig.resolve("run")["oscillator.m"] == 0.5
    assert RunConfig.resolve("fig3")["oscillator.m"] == 1.0
    cfg = RunConfig.resolve("fig3", {"oscillator.m": "2", "engine": "analytic"}, {"engine": "numeric"})
    assert cfg["oscillator.m"] == 2.0 and cfg["engine"] == "numeric"
    assert cfg["oscillator.lambda"] == 4.0


@pytest.mark.parametrize("values", [
    {"oscillator.m": "-1"}, {"strategy.n_max": "x"}, {"engine": "fast"}, {"strategy.realize_mean": "maybe"},
    {"scan.stop_over_T": "-1"}, {"threads": "0"}, {"spectrum.levels": "11"}, {"grid.n_points": "100"},
    {"measurement.delta_a": "inf"}, {"figure.tau_over_T": "-1"},
])
def test_invalid_values(values):
    with pytest.raises(ConfigError):
        RunConfig.resolve("run", values)


def test_quartic_commands_need_lambda():
    with pytest.raises(ConfigError):
        RunConfig.resolve("fig4", {"oscillator.lambda": "0"})


def test_presets_use_known_keys():
    for preset in PRESETS.values():
        assert set(preset) <= set(SCHEMA)


def test_manifest_round_trip():
    cfg = RunConfig.resolve("fig2", {"measurement.delta_a": "2"})
    again = RunConfig.resolve("fig2", parse_text(cfg.manifest()))
    assert again.manifest() == cfg.manifest()
    assert cfg.manifest().splitlines()[0] == "# command: fig2"


def test_derived_objects():
    cfg = RunConfig.resolve("run", {"measurement.tau_over_T": "0.1", "scan.points": "3",
                                    "scan.start_over_T": "0.5", "scan.stop_over_T": "1.5"})
    assert cfg.measurement().tau == pytest.approx(0.2 * math.pi)
    assert cfg.scan_values() == pytest.approx([math.pi, 2 * math.pi, 3 * math.pi])
    assert cfg.strategy_spec(kind="double_peak").initial_state.x0 == 3.0
    assert cfg.grid().n_points == 2048
    assert cfg.evolution_params().dt_free == pytest.approx(2 * math.pi / 1000)


def test_out_dir_env(monkeypatch):
    monkeypatch.setenv("QMONITOR_OUT", "/tmp/elsewhere")
    assert str(default_out_dir()) == "/tmp/elsewhere"
    monkeypatch.delenv("QMONITOR_OUT")
    assert str(default_out_dir()) == "qmonitor-out"


def _config(tmp_path, text):
    path = tmp_path / "cfg.txt"
    path.write_text(text)
    return ["--config", str(path)]


def test_run_single_measurement(tmp_path, capsys):
    args = _config(tmp_path, "strategy.n_max=1\nmeasurement.tau_over_T=0\n")
    assert main(["run", "--out", str(tmp_path / "o")] + args) == 0
    header, rows = io.read_csv(tmp_path / "o" / "trace.csv")
    assert header == ["n", "delta_a_eff", "pre_width"]
    assert len(rows) == 1 and rows[0][1] == pytest.approx(math.sqrt(26), rel=1e-9)
    assert (tmp_path / "o" / "manifest.txt").read_text().startswith("# command: run")
    assert "trace.csv" in capsys.readouterr().out


def test_exit_code_config_error(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.txt"), "--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["run", "--out", str(tmp_path)] + _config(tmp_path, "oscillator.omega=0\n")) == 2


def test_exit_code_numerical_error(tmp_path, capsys):
    args = _config(tmp_path, "measurement.delta_a=0.05\ngrid.x_max=31\ngrid.n_points=512\n")
    assert main(["run", "--out", str(tmp_path / "o")] + args) == 3
    err = capsys.readouterr().err
    assert "propagator" in err and "measurement=1" in err


def test_run_is_deterministic(tmp_path):
    args = _config(tmp_path, "strategy.n_max=6\nstrategy.stop_on_converge=false\n")
    outputs = []
    for name in ("a", "b"):
        assert main(["run", "--engine", "both", "--out", str(tmp_path / name)] + args) == 0
        outputs.append([(tmp_path / name / f).read_bytes() for f in ("trace.csv", "trace.svg", "manifest.txt")])
    assert outputs[0] == outputs[1]
    header, rows = io.read_csv(tmp_path / "a" / "trace.csv")
    assert header == ["n", "delta_a_eff_analytic", "pre_width_analytic", "delta_a_eff_numeric", "pre_width_numeric"]
    for row in rows:
        assert row[3] == pytest.approx(row[1], rel=1e-3)


def test_manifest_reproduces_run(tmp_path):
    args = _config(tmp_path, "strategy.n_max=3\nengine=analytic\n")
    assert main(["run", "--out", str(tmp_path / "a")] + args) == 0
    assert main(["run", "--out", str(tmp_path / "b"), "--config", str(tmp_path / "a" / "manifest.txt")]) == 0
    assert (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()


def test_fig1_files_and_coincidence(tmp_path):
    assert main(["fig1", "--out", str(tmp_path)]) == 0
    traces = {}
    for q in ("0.25", "0.5", "0.75"):
        header, rows = io.read_csv(tmp_path / f"fig1_trace_dT_{q}.csv")
        assert len(rows) == 20 and header[1] == "delta_a_eff_analytic"
        traces[q] = [r[3] for r in rows]
    assert traces["0.25"] == pytest.approx(traces["0.75"], rel=1e-3)
    assert (tmp_path / "fig1.svg").exists()


def test_fig2_small_scan(tmp_path):
    args = _config(tmp_path, "scan.points=5\nscan.stop_over_T=1\n")
    assert main(["fig2", "--out", str(tmp_path / "o")] + args) == 0
    for tau in ("0", "1e-05", "0.1"):
        header, rows = io.read_csv(tmp_path / "o" / f"fig2_scan_tau_{tau}.csv")
        assert header == ["dT_over_T", "asymptote", "n_used", "converged"]
        assert [r[0] for r in rows] == pytest.approx([0, 0.25, 0.5, 0.75, 1])
    assert (tmp_path / "o" / "fig2.svg").exists()


def test_fig3_and_fig4_small(tmp_path):
    args = _config(tmp_path, "strategy.n_max=3\nfigure.quiescent_over_T=0.25\nscan.points=3\n")
    assert main(["fig3", "--out", str(tmp_path / "o")] + args) == 0
    for kind in ("gaussian", "double_peak"):
        assert len(io.read_csv(tmp_path / "o" / f"fig3_trace_dT_0.25_{kind}.csv")[1]) == 3
    assert main(["fig3", "--engine", "analytic", "--out", str(tmp_path / "o")]) == 2
    assert main(["fig4", "--out", str(tmp_path / "o")] + args) == 0
    assert len(io.read_csv(tmp_path / "o" / "fig4_scan.csv")[1]) == 3
    best = io.read_csv(tmp_path / "o" / "fig4_predicted_minima.csv")[1][0][0]
    assert best == pytest.approx(0.675, rel=0.05)


def test_spectrum_command(tmp_path):
    assert main(["spectrum", "--out", str(tmp_path / "q")]) == 0
    periods = {(int(i), int(j)): t for i, j, t in io.read_csv(tmp_path / "q" / "periods_wkb.csv")[1]}
    assert periods[(2, 0)] == pytest.approx(0.225, rel=0.02)
    assert periods[(4, 0)] == pytest.approx(0.098, rel=0.02)
    args = _config(tmp_path, "oscillator.m=0.5\noscillator.lambda=0\nspectrum.levels=3\n")
    assert main(["spectrum", "--out", str(tmp_path / "h")] + args) == 0
    levels = [e for _, e in io.read_csv(tmp_path / "h" / "levels_diagonalization.csv")[1]]
    assert levels == pytest.approx([0.5, 1.5, 2.5, 3.5], abs=1e-6)
    assert not (tmp_path / "h" / "predicted_minima.csv").exists()


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "qmonitor", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "fig4" in out.stdout
    bad = subprocess.run([sys.executable, "-m", "qmonitor", "fig9"], capture_output=True, text=True)
    assert bad.returncode == 2
