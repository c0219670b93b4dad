"""
Command-line front end.

    qmonitor fig1|fig2|fig3|fig4|run|scan|spectrum [--config PATH] [--out DIR]
             [--engine analytic|numeric|both] [--threads N]

Exit status: 0 on success, 2 for configuration errors, 3 for numerical
failures (module and context are printed on stderr).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io
from .config import RunConfig, default_out_dir, parse_file
from .core import ConfigError, NumericalError
from .spectral import eigenvalues_fd, eigenvalues_wkb, predict_minima
from .strategy import run_strategy, scan_quiescent

COMMANDS = ("fig1", "fig2", "fig3", "fig4", "run", "scan", "spectrum")


def _engines(cfg, allow_both=True):
    engine = cfg["engine"]
    if engine == "both":
        if not allow_both:
            raise ConfigError("this command takes a single engine")
        return ["analytic", "numeric"]
    return [engine]


def _trace(cfg, spec, engine):
    grid = cfg.grid(spec) if engine == "numeric" else None
    return run_strategy(spec, engine, grid=grid, params=cfg.evolution_params(),
                        path=cfg["measurement.path"], realize_mean=cfg["strategy.realize_mean"],
                        stop_on_converge=cfg["strategy.stop_on_converge"])


def _scan(cfg, spec, engine):
    grid = cfg.grid(spec) if engine == "numeric" else None
    return scan_quiescent(spec, cfg.scan_values(), engine, grid=grid, params=cfg.evolution_params(),
                          path=cfg["measurement.path"], threads=cfg["threads"])


def _tag(value):
    return f"{value:g}"


def _write_trace(path, traces):
    """``traces`` maps engine name to trace; columns are joined on ``n``."""
    names = list(traces)
    header = ["n"]
    for name in names:
        header += [f"delta_a_eff_{name}", f"pre_width_{name}"] if len(names) > 1 else ["delta_a_eff", "pre_width"]
    longest = max(len(t) for t in traces.values())
    rows = []
    for i in range(longest):
        row = [i + 1]
        for name in names:
            entries = traces[name].entries
            row += [entries[i].delta_a_eff, entries[i].pre_width] if i < len(entries) else [float("nan")] * 2
        rows.append(row)
    return io.write_csv(path, header, rows)


def _write_scan(path, result, period):
    rows = [(p.quiescent / period, p.asymptote, p.n_used, int(p.converged)) for p in result.points]
    return io.write_csv(path, ["dT_over_T", "asymptote", "n_used", "converged"], rows)


def cmd_fig1(cfg, out):
    series, files = [], []
    for q in cfg["figure.quiescent_over_T"]:
        spec = cfg.strategy_spec(quiescent_over_T=q)
        traces = {e: _trace(cfg, spec, e) for e in _engines(cfg)}
        files.append(_write_trace(out / f"fig1_trace_dT_{_tag(q)}.csv", traces))
        for name, t in traces.items():
            series.append((f"dT/T={_tag(q)} {name}", list(t.n), list(t.values)))
    files.append(io.write_line_chart(out / "fig1.svg", "Effective uncertainty vs measurement number",
                                     "n", "delta_a_eff", series, markers=True))
    return files


def cmd_fig2(cfg, out):
    series, files = [], []
    for tau in cfg["figure.tau_over_T"]:
        spec = cfg.strategy_spec(tau_over_T=tau)
        for engine in _engines(cfg):
            result = _scan(cfg, spec, engine)
            suffix = f"_{engine}" if cfg["engine"] == "both" else ""
            files.append(_write_scan(out / f"fig2_scan_tau_{_tag(tau)}{suffix}.csv", result, cfg.period))
            series.append((f"tau/T={_tag(tau)}{suffix}", [q / cfg.period for q in result.quiescent],
                           result.asymptotes))
    files.append(io.write_line_chart(out / "fig2.svg", "Asymptotic uncertainty vs quiescent time",
                                     "dT/T", "asymptotic delta_a_eff", series))
    return files


def cmd_fig3(cfg, out):
    series, files = [], []
    for engine in _engines(cfg, allow_both=False):
        if engine != "numeric":
            raise ConfigError("fig3 needs the numeric engine")
    for q in cfg["figure.quiescent_over_T"]:
        for kind in ("gaussian", "double_peak"):
            spec = cfg.strategy_spec(quiescent_over_T=q, kind=kind)
            trace = _trace(cfg, spec, "numeric")
            files.append(_write_trace(out / f"fig3_trace_dT_{_tag(q)}_{kind}.csv", {"numeric": trace}))
            series.append((f"dT/T={_tag(q)} {kind}", list(trace.n), list(trace.values)))
    files.append(io.write_line_chart(out / "fig3.svg", "Quartic oscillator: uncertainty vs n",
                                     "n", "delta_a_eff", series, markers=True))
    return files


def cmd_fig4(cfg, out):
    if _engines(cfg, allow_both=False) != ["numeric"]:
        raise ConfigError("fig4 needs the numeric engine")
    spec = cfg.strategy_spec()
    result = _scan(cfg, spec, "numeric")
    files = [_write_scan(out / "fig4_scan.csv", result, cfg.period)]
    spectrum = eigenvalues_fd(spec.oscillator, 4, units=spec.units)
    stop = cfg["scan.stop_over_T"]
    files.append(io.write_csv(out / "fig4_predicted_minima.csv", ["dT_over_T", "score"],
                              predict_minima(spectrum, stop)))
    files.append(io.write_line_chart(out / "fig4.svg", "Quartic oscillator: asymptote vs quiescent time",
                                     "dT/T", "asymptotic delta_a_eff",
                                     [("impulsive", [q / cfg.period for q in result.quiescent],
                                       result.asymptotes)]))
    return files


def cmd_run(cfg, out):
    spec = cfg.strategy_spec()
    traces = {e: _trace(cfg, spec, e) for e in _engines(cfg)}
    files = [_write_trace(out / "trace.csv", traces)]
    files.append(io.write_line_chart(out / "trace.svg", "Effective uncertainty vs n", "n", "delta_a_eff",
                                     [(e, list(t.n), list(t.values)) for e, t in traces.items()],
                                     markers=True))
    return files


def cmd_scan(cfg, out):
    spec = cfg.strategy_spec()
    series, files = [], []
    for engine in _engines(cfg):
        result = _scan(cfg, spec, engine)
        suffix = f"_{engine}" if cfg["engine"] == "both" else ""
        files.append(_write_scan(out / f"scan{suffix}.csv", result, cfg.period))
        series.append((engine, [q / cfg.period for q in result.quiescent], result.asymptotes))
    files.append(io.write_line_chart(out / "scan.svg", "Asymptotic uncertainty vs quiescent time",
                                     "dT/T", "asymptotic delta_a_eff", series))
    return files


def cmd_spectrum(cfg, out):
    osc, units, k = cfg.oscillator(), cfg.units(), cfg["spectrum.levels"]
    files = []
    spectra = {"diagonalization": eigenvalues_fd(osc, k, units=units), "wkb": eigenvalues_wkb(osc, k, units)}
    for name, spec in spectra.items():
        files.append(io.write_csv(out / f"levels_{name}.csv", ["i", "E_i"], spec.level_rows()))
        files.append(io.write_csv(out / f"periods_{name}.csv", ["i", "j", "T_ij_over_T"], spec.period_rows()))
    if k >= 4:
        files.append(io.write_csv(out / "predicted_minima.csv", ["dT_over_T", "score"],
                                  predict_minima(spectra["diagonalization"], cfg["scan.stop_over_T"])))
    return files


HANDLERS = {"fig1": cmd_fig1, "fig2": cmd_fig2, "fig3": cmd_fig3, "fig4": cmd_fig4,
            "run": cmd_run, "scan": cmd_scan, "spectrum": cmd_spectrum}


def build_parser():
    parser = argparse.ArgumentParser(prog="qmonitor", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="key=value configuration file")
    parser.add_argument("--out", type=Path, help="output directory (default: $QMONITOR_OUT or ./qmonitor-out)")
    parser.add_argument("--engine", choices=("analytic", "numeric", "both"))
    parser.add_argument("--threads", type=int)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        file_values = parse_file(args.config) if args.config else {}
        cfg = RunConfig.resolve(args.command, file_values, {"engine": args.engine, "threads": args.threads})
        out = args.out or default_out_dir()
        out.mkdir(parents=True, exist_ok=True)
        (out / "manifest.txt").write_text(cfg.manifest())
        files = HANDLERS[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure in {exc.module or 'unknown'}: {exc}", file=sys.stderr)
        return 3
    for path in files:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
