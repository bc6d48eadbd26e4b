"""Command-line front end: pattern sweeps, CHSH reports, synthetic data, analysis.

Exit codes: 0 success, 2 usage error, 3 data error. Output files embed the
resolved configuration, so identical config + seed reproduce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bell import PAIR_LABELS, SettingQuad, chsh_finite, chsh_ideal, optimize_general, optimize_symmetric
from .binspace import apply_dispersion, apply_modulator, correlated_state, parity_probabilities
from .closedform import apply_crosstalk, effective_drive, ideal_probabilities
from .config import RunConfig, load_config, parse_bins
from .counts import (DEFAULT_BACKGROUND_WINDOW, DEFAULT_PEAK_WINDOW, chsh_estimate, emit_histogram,
                     extract_counts, ingest_histogram, simulate_counts, synthesize_histogram,
                     visibility)
from .errors import FreqbinError, InvalidInputError
from .params import ModulationSetting

USAGE_EXIT = 2
DATA_EXIT = 3


class _UsageError(Exception):
    pass


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the diagnostic
        return int(exc.code or 0)
    try:
        config = _resolve_config(args)
        return args.handler(args, config)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except FreqbinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output file (or directory for simulate)")
    common.add_argument("--format", choices=("csv", "json"), dest="out_format")
    common.add_argument("--bins", help="bin list '1,2,3' or range '1..6'")
    common.add_argument("--rf-frequency", type=float)
    common.add_argument("--center-frequency", type=float)
    common.add_argument("--epsilon", type=float, help="truncation amplitude tolerance")
    common.add_argument("--max-order", type=int, help="truncation hard cap")
    common.add_argument("--crosstalk", type=float)
    common.add_argument("--efficiency", type=float)
    common.add_argument("--pair-rate", type=float)
    common.add_argument("--accidental-rate", type=float)
    common.add_argument("--duration", type=float)
    common.add_argument("--dispersion-quadratic", type=float)

    settings = argparse.ArgumentParser(add_help=False)
    settings.add_argument("--a0", type=float, default=0.2318)
    settings.add_argument("--a1", type=float, default=0.6955)
    settings.add_argument("--b0", type=float, default=None, help="defaults to a0")
    settings.add_argument("--b1", type=float, default=None, help="defaults to a1")
    settings.add_argument("--alpha0", type=float, default=0.0)
    settings.add_argument("--alpha1", type=float, default=math.pi)
    settings.add_argument("--beta0", type=float, default=None, help="defaults to alpha0")
    settings.add_argument("--beta1", type=float, default=None, help="defaults to alpha1")

    parser = argparse.ArgumentParser(prog="freqbin",
                                     description="Frequency-bin entangled photon-pair simulator "
                                                 "and coincidence statistics toolkit")
    parser.add_argument("--version", action="version", version=f"freqbin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", parents=[common], help="two-photon interference curve over alpha")
    p.add_argument("--a", type=float, default=0.6955)
    p.add_argument("--b", type=float, default=0.6955)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--alpha-start", type=float, default=0.0)
    p.add_argument("--alpha-stop", type=float, default=2.0 * math.pi)
    p.add_argument("--steps", type=int, default=25, help="number of sweep points (>= 2)")
    p.add_argument("--pattern-model", choices=("ideal", "finite", "both"), default="ideal")
    p.set_defaults(handler=_cmd_pattern)

    chsh = sub.add_parser("chsh", help="CHSH evaluation, optimization, and ensembles")
    chsh_sub = chsh.add_subparsers(dest="chsh_command", required=True)

    p = chsh_sub.add_parser("eval", parents=[common, settings],
                            help="theory and synthetic-experiment correlator table")
    p.set_defaults(handler=_cmd_chsh_eval)

    p = chsh_sub.add_parser("optimize", parents=[common],
                            help="maximize S over the symmetric family (and optionally all 8 parameters)")
    p.add_argument("--interval", type=float, nargs=2, default=(0.0, 0.5), metavar=("LO", "HI"))
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--general", action="store_true", help="also run the 8-parameter search")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--amplitude-bound", type=float, default=1.5)
    p.set_defaults(handler=_cmd_chsh_optimize)

    p = chsh_sub.add_parser("finite", parents=[common, settings],
                            help="CHSH from the finite-bin simulation")
    p.set_defaults(handler=_cmd_chsh_finite)

    p = chsh_sub.add_parser("montecarlo", parents=[common, settings],
                            help="seeded ensemble of synthetic CHSH estimates")
    p.add_argument("--ensembles", type=int, default=500)
    p.set_defaults(handler=_cmd_chsh_montecarlo)

    p = sub.add_parser("simulate", parents=[common, settings],
                       help="write synthetic coincidence histograms and count records")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("analyze", parents=[common],
                       help="estimate CHSH (4 histograms) or visibility (phase scan) from files")
    p.add_argument("files", nargs="+", help="histogram CSV files")
    p.add_argument("--peak-window", type=float, nargs=2, default=DEFAULT_PEAK_WINDOW,
                   metavar=("LO", "HI"))
    p.add_argument("--background-window", type=float, nargs=2, default=DEFAULT_BACKGROUND_WINDOW,
                   metavar=("LO", "HI"))
    p.add_argument("--labels", help="comma-separated setting labels, e.g. 'A0B0,A0B1,A1B0,A1B1'")
    p.add_argument("--no-subtract", action="store_true", help="skip background subtraction")
    p.add_argument("--normalization", help="four per-outcome normalization factors 'EE,EO,OE,OO'")
    p.add_argument("--visibility", choices=("EO", "OE"),
                   help="treat the files as a phase scan and report fringe visibility")
    p.set_defaults(handler=_cmd_analyze)

    return parser


def _resolve_config(args) -> RunConfig:
    config = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    data = config.to_dict()
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    if getattr(args, "bins", None) is not None:
        data["bins"] = list(parse_bins(args.bins))
    for flag, key in (("rf_frequency", "rf_frequency"), ("center_frequency", "center_frequency")):
        value = getattr(args, flag, None)
        if value is not None:
            data[key] = value
    for flag, section, key in (
            ("epsilon", "truncation", "epsilon"),
            ("max_order", "truncation", "max_order"),
            ("crosstalk", "measurement", "crosstalk"),
            ("efficiency", "measurement", "efficiency"),
            ("pair_rate", "measurement", "pair_rate"),
            ("accidental_rate", "measurement", "accidental_rate"),
            ("duration", "measurement", "duration"),
            ("dispersion_quadratic", "dispersion", "quadratic_coefficient")):
        value = getattr(args, flag, None)
        if value is not None:
            data[section][key] = value
    return RunConfig.from_dict(data)


def _quad_from_args(args) -> SettingQuad:
    b0 = args.b0 if args.b0 is not None else args.a0
    b1 = args.b1 if args.b1 is not None else args.a1
    beta0 = args.beta0 if args.beta0 is not None else args.alpha0
    beta1 = args.beta1 if args.beta1 is not None else args.alpha1
    return SettingQuad(a0=ModulationSetting(args.a0, args.alpha0),
                       a1=ModulationSetting(args.a1, args.alpha1),
                       b0=ModulationSetting(b0, beta0),
                       b1=ModulationSetting(b1, beta1))


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _json_text(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _write(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _record(command: str, config: RunConfig, parameters: dict, results: dict) -> dict:
    return {"command": command, "version": __version__, "config": config.to_dict(),
            "parameters": parameters, "results": results}


def _emit_report(args, payload: dict, csv_lines: list[str]) -> None:
    """Write a report to --out as JSON (default) or CSV with a sibling run record."""
    if not args.out:
        return
    if (args.out_format or "json") == "csv":
        _write(args.out, "\n".join(csv_lines) + "\n")
        _write(str(args.out) + ".run.json", _json_text(payload))
    else:
        _write(args.out, _json_text(payload))


def _setting_dict(setting: ModulationSetting) -> dict:
    return {"amplitude": setting.amplitude, "phase": setting.phase}


def _quad_dict(quad: SettingQuad) -> dict:
    return {"a0": _setting_dict(quad.a0), "a1": _setting_dict(quad.a1),
            "b0": _setting_dict(quad.b0), "b1": _setting_dict(quad.b1)}


def _synthetic_records(quad: SettingQuad, config: RunConfig) -> list:
    model = config.measurement
    records = []
    for index, ((sa, sb), label) in enumerate(zip(quad.pairs(), PAIR_LABELS)):
        probs = apply_crosstalk(ideal_probabilities(effective_drive(sa, sb)), model.crosstalk)
        records.append(simulate_counts(probs, model, config.seed + index, labels=label))
    return records


# --- pattern -----------------------------------------------------------------

def _cmd_pattern(args, config: RunConfig) -> int:
    if args.steps < 2:
        raise _UsageError("--steps must be at least 2")
    if not args.alpha_stop > args.alpha_start:
        raise _UsageError("--alpha-stop must exceed --alpha-start")
    if args.a < 0 or args.b < 0:
        raise _UsageError("amplitudes must be >= 0")

    alphas = [args.alpha_start + k * (args.alpha_stop - args.alpha_start) / (args.steps - 1)
              for k in range(args.steps)]
    want_ideal = args.pattern_model in ("ideal", "both")
    want_finite = args.pattern_model in ("finite", "both")

    ideal_rows = []
    if want_ideal:
        for alpha in alphas:
            drive = effective_drive(ModulationSetting(args.a, alpha), ModulationSetting(args.b, args.beta))
            ideal_rows.append(ideal_probabilities(drive).as_tuple())

    finite_rows = []
    if want_finite:
        base = correlated_state(config.bins)
        if not config.dispersion.is_zero():
            base = apply_dispersion(base, config.dispersion, "A")
            base = apply_dispersion(base, config.dispersion, "B")
        setting_b = ModulationSetting(args.b, args.beta)
        for alpha in alphas:
            state = apply_modulator(base, "A", ModulationSetting(args.a, alpha), config.truncation)
            state = apply_modulator(state, "B", setting_b, config.truncation)
            finite_rows.append(parity_probabilities(state, config.measurement).as_tuple())

    results: dict = {}
    if want_ideal and want_finite:
        gap = max(abs(i - f) for irow, frow in zip(ideal_rows, finite_rows)
                  for i, f in zip(irow, frow))
        results["max_curve_gap"] = gap

    parameters = {"a": args.a, "b": args.b, "beta": args.beta,
                  "alpha_start": args.alpha_start, "alpha_stop": args.alpha_stop,
                  "steps": args.steps, "model": args.pattern_model}
    out = args.out or "pattern.csv"
    out_format = args.out_format or "csv"
    if out_format == "json":
        payload = _record("pattern", config, parameters, results)
        payload["results"]["alpha"] = alphas
        if want_ideal:
            payload["results"]["ideal"] = [list(r) for r in ideal_rows]
        if want_finite:
            payload["results"]["finite"] = [list(r) for r in finite_rows]
        _write(out, _json_text(payload))
    else:
        lines = [_pattern_header(want_ideal, want_finite)]
        for k, alpha in enumerate(alphas):
            row = [_fmt(alpha)]
            if want_ideal:
                row.extend(_fmt(v) for v in ideal_rows[k])
            if want_finite:
                row.extend(_fmt(v) for v in finite_rows[k])
            lines.append(",".join(row))
        _write(out, "\n".join(lines) + "\n")
        _write(str(out) + ".run.json", _json_text(_record("pattern", config, parameters, results)))
    print(f"pattern: wrote {args.steps} sweep points to {out}")
    if "max_curve_gap" in results:
        print(f"pattern: max ideal/finite curve gap {results['max_curve_gap']:.6e}")
    return 0


def _pattern_header(want_ideal: bool, want_finite: bool) -> str:
    cols = ["alpha"]
    names = ("p_ee", "p_eo", "p_oe", "p_oo")
    if want_ideal and want_finite:
        cols += [f"{n}_ideal" for n in names] + [f"{n}_finite" for n in names]
    else:
        cols += list(names)
    return ",".join(cols)


# --- chsh --------------------------------------------------------------------

def _cmd_chsh_eval(args, config: RunConfig) -> int:
    quad = _quad_from_args(args)
    theory = chsh_ideal(quad)
    records = _synthetic_records(quad, config)
    s, sigma_s, c_table = chsh_estimate(records, subtract=True)
    sigmas = [_correlator_sigma(rec) for rec in records]

    print(f"{'pair':6s} {'settings':48s} {'theory':>8s} {'experiment':>18s}")
    for (label_a, label_b), (sa, sb), e_theory, c, sig in zip(PAIR_LABELS, quad.pairs(),
                                                              theory.correlators, c_table, sigmas):
        setting_text = (f"a={sa.amplitude:.4f} alpha={sa.phase:.4f} "
                        f"b={sb.amplitude:.4f} beta={sb.phase:.4f}")
        print(f"{label_a},{label_b:3s} {setting_text:48s} {e_theory:8.3f} {c:10.3f} +/- {sig:.3f}")
    print(f"{'S':6s} {'':48s} {theory.s_value:8.3f} {s:10.3f} +/- {sigma_s:.3f}")

    results = {"theory": {"correlators": list(theory.correlators), "s": theory.s_value},
               "experiment": {"c_table": list(c_table), "s": s, "sigma_s": sigma_s},
               "records": [rec.to_json_dict() for rec in records]}
    lines = ["pair,theory,experiment,sigma"]
    for (la, lb), e_theory, c, sig in zip(PAIR_LABELS, theory.correlators, c_table, sigmas):
        lines.append(f"{la}{lb},{_fmt(e_theory)},{_fmt(c)},{_fmt(sig)}")
    lines.append(f"S,{_fmt(theory.s_value)},{_fmt(s)},{_fmt(sigma_s)}")
    _emit_report(args, _record("chsh-eval", config, _quad_dict(quad), results), lines)
    return 0


def _correlator_sigma(record) -> float:
    """Delta-method sigma of a single pair's C = N-/N+ from net counts."""
    same = record.net_counts()[0] + record.net_counts()[3]
    cross = record.net_counts()[1] + record.net_counts()[2]
    var_same = record.counts()[0] + record.counts()[3]
    var_cross = record.counts()[1] + record.counts()[2]
    n_plus = same + cross
    return math.sqrt(4.0 * (cross**2 * var_same + same**2 * var_cross)) / n_plus**2


def _cmd_chsh_optimize(args, config: RunConfig) -> int:
    c_star, s_star = optimize_symmetric(tuple(args.interval), args.tolerance)
    print(f"symmetric optimum: c* = {c_star:.6f}  amplitudes (c, 3c) = "
          f"({c_star:.4f}, {3 * c_star:.4f})  S = {s_star:.6f}")
    results = {"symmetric": {"c_star": c_star, "s_star": s_star}}
    lines = ["quantity,value", f"c_star,{_fmt(c_star)}", f"s_star,{_fmt(s_star)}"]
    if args.general:
        zero = ModulationSetting(0.0, 0.0)
        initial = SettingQuad(zero, zero, zero, zero)
        quad, report = optimize_general(initial, args.amplitude_bound, args.restarts, config.seed)
        ratios = [dr.d / report.drives[0].d if report.drives[0].d else float("nan")
                  for dr in report.drives]
        print(f"general optimum:   S = {report.s_value:.6f}  drives = "
              f"({', '.join(f'{dr.d:.4f}' for dr in report.drives)})  D11/D00 = {ratios[3]:.4f}")
        results["general"] = {"quad": _quad_dict(quad), "s": report.s_value,
                              "drives": [dr.d for dr in report.drives]}
        lines.append(f"s_general,{_fmt(report.s_value)}")
        lines.extend(f"d_{label},{_fmt(dr.d)}"
                     for label, dr in zip(("00", "01", "10", "11"), report.drives))
    _emit_report(args, _record("chsh-optimize", config,
                               {"interval": list(args.interval),
                                "tolerance": args.tolerance,
                                "general": args.general,
                                "restarts": args.restarts,
                                "amplitude_bound": args.amplitude_bound},
                               results), lines)
    return 0


def _cmd_chsh_finite(args, config: RunConfig) -> int:
    quad = _quad_from_args(args)
    report = chsh_finite(quad, config.bins, config.measurement, config.dispersion, config.truncation)
    ideal = chsh_ideal(quad)
    lines = ["pair,finite,ideal"]
    for (la, lb), e_finite, e_ideal in zip(PAIR_LABELS, report.correlators, ideal.correlators):
        print(f"E({la},{lb})  finite = {e_finite:9.6f}   ideal = {e_ideal:9.6f}")
        lines.append(f"{la}{lb},{_fmt(e_finite)},{_fmt(e_ideal)}")
    print(f"S        finite = {report.s_value:9.6f}   ideal = {ideal.s_value:9.6f}")
    lines.append(f"S,{_fmt(report.s_value)},{_fmt(ideal.s_value)}")
    results = {"finite": {"correlators": list(report.correlators), "s": report.s_value},
               "ideal": {"correlators": list(ideal.correlators), "s": ideal.s_value}}
    _emit_report(args, _record("chsh-finite", config, _quad_dict(quad), results), lines)
    return 0


def _cmd_chsh_montecarlo(args, config: RunConfig) -> int:
    if args.ensembles < 2:
        raise _UsageError("--ensembles must be at least 2")
    quad = _quad_from_args(args)
    model = config.measurement
    probs = [apply_crosstalk(ideal_probabilities(effective_drive(sa, sb)), model.crosstalk)
             for sa, sb in quad.pairs()]
    s_values = []
    sigmas = []
    for ensemble in range(args.ensembles):
        records = [simulate_counts(probs[i], model, config.seed + 4 * ensemble + i,
                                   labels=PAIR_LABELS[i]) for i in range(4)]
        s, sigma, _ = chsh_estimate(records, subtract=True)
        s_values.append(s)
        sigmas.append(sigma)
    mean = float(np.mean(s_values))
    std = float(np.std(s_values, ddof=1))
    mean_sigma = float(np.mean(sigmas))
    print(f"montecarlo: {args.ensembles} ensembles  S = {mean:.4f} +/- {std:.4f} (empirical)"
          f"  mean reported sigma_s = {mean_sigma:.4f}")
    results = {"ensembles": args.ensembles, "s_mean": mean, "s_std": std,
               "mean_sigma_s": mean_sigma}
    lines = ["quantity,value", f"ensembles,{args.ensembles}", f"s_mean,{_fmt(mean)}",
             f"s_std,{_fmt(std)}", f"mean_sigma_s,{_fmt(mean_sigma)}"]
    _emit_report(args, _record("chsh-montecarlo", config, _quad_dict(quad), results), lines)
    return 0


# --- simulate / analyze --------------------------------------------------------

def _cmd_simulate(args, config: RunConfig) -> int:
    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    quad = _quad_from_args(args)
    model = config.measurement
    written = []
    for index, ((sa, sb), (la, lb)) in enumerate(zip(quad.pairs(), PAIR_LABELS)):
        probs = apply_crosstalk(ideal_probabilities(effective_drive(sa, sb)), model.crosstalk)
        histogram = synthesize_histogram(probs, model, config.seed + index)
        hist_path = out_dir / f"hist_{la}{lb}.csv"
        _write(hist_path, emit_histogram(histogram))
        record = extract_counts(histogram, DEFAULT_PEAK_WINDOW, DEFAULT_BACKGROUND_WINDOW,
                                duration_s=model.duration, labels=(la, lb))
        record_path = out_dir / f"record_{la}{lb}.json"
        _write(record_path, _json_text(record.to_json_dict()))
        written.extend([hist_path.name, record_path.name])
    run_path = out_dir / "simulate.run.json"
    _write(run_path, _json_text(_record("simulate", config, _quad_dict(quad),
                                        {"files": written,
                                         "peak_window": list(DEFAULT_PEAK_WINDOW),
                                         "background_window": list(DEFAULT_BACKGROUND_WINDOW)})))
    print(f"simulate: wrote {len(written) + 1} files to {out_dir}")
    return 0


def _cmd_analyze(args, config: RunConfig) -> int:
    labels = None
    if args.labels:
        labels = [label.strip() for label in args.labels.split(",")]
        if len(labels) != len(args.files):
            raise _UsageError("--labels count must match the number of files")
    normalization = None
    if args.normalization:
        parts = args.normalization.split(",")
        if len(parts) != 4:
            raise _UsageError("--normalization needs four comma-separated factors")
        normalization = tuple(float(p) for p in parts)

    records = []
    for index, path in enumerate(args.files):
        try:
            with open(path, "rb") as handle:
                histogram = ingest_histogram(handle)
        except OSError as exc:
            raise InvalidInputError(f"{path}: {exc}") from None
        except FreqbinError as exc:
            raise InvalidInputError(f"{path}: {exc}") from None
        label = labels[index] if labels else Path(path).stem
        records.append(extract_counts(histogram, tuple(args.peak_window),
                                      tuple(args.background_window),
                                      duration_s=args.duration or 1.0,
                                      labels=(label, label)))

    if args.visibility:
        vis, sigma = visibility(records, args.visibility)
        print(f"visibility({args.visibility}) = {vis:.4f} +/- {sigma:.4f} over {len(records)} scan points")
        results = {"visibility": vis, "sigma": sigma, "outcome": args.visibility}
        lines = ["quantity,value", f"visibility,{_fmt(vis)}", f"sigma,{_fmt(sigma)}"]
    else:
        if len(records) != 4:
            raise _UsageError("CHSH analysis needs exactly 4 histogram files (A0B0, A0B1, A1B0, A1B1)")
        s, sigma_s, c_table = chsh_estimate(records, subtract=not args.no_subtract,
                                            normalization=normalization)
        lines = ["pair,c"]
        for rec, c in zip(records, c_table):
            print(f"C({rec.setting_labels[0]}) = {c:8.4f}")
            lines.append(f"{rec.setting_labels[0]},{_fmt(c)}")
        print(f"S = {s:.4f} +/- {sigma_s:.4f}")
        lines.append(f"S,{_fmt(s)}")
        lines.append(f"sigma_s,{_fmt(sigma_s)}")
        results = {"s": s, "sigma_s": sigma_s, "c_table": list(c_table),
                   "records": [rec.to_json_dict() for rec in records]}
    parameters = {"files": list(args.files), "peak_window": list(args.peak_window),
                  "background_window": list(args.background_window),
                  "subtract": not args.no_subtract,
                  "normalization": list(normalization) if normalization else None,
                  "visibility": args.visibility}
    _emit_report(args, _record("analyze", config, parameters, results), lines)
    return 0


if __name__ == "__main__":
    sys.exit(main())
