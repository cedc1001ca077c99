"""Command-line front end.

    radpair <command> [options]

Commands: eigen, trace, beats, yield, hmf, sweep-b, sweep-a, sweep-kr, check.
Options given on the command line override values read with ``--config``.
Exit status: 0 ok, 1 invalid input, 2 numerical failure, 64 unknown command.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from pathlib import Path

import numpy as np

from radpair import __version__
from radpair.config import ConfigError, RunConfig, config_from_dict
from radpair.dynamics import beat_spectrum, default_times, singlet_probability_trace
from radpair.eigen import EigenSolverError, analytic_eigvec_residuals, singlet_overlap_levels
from radpair.sweep import (
    DEFAULT_FIELD_RATES,
    default_field_grid,
    default_hyperfine_grid,
    default_rate_grid,
    format_value,
    records_to_csv,
    records_to_jsonl,
    sweep_field,
    sweep_hyperfine,
    sweep_kr,
)
from radpair.system import printed_matrix_diagnostic
from radpair.yields import (
    KineticParams,
    QuadratureBudgetError,
    UndefinedEffectError,
    YieldRangeError,
    _singlet_yield,
    hmf_effect,
    yield_any,
    yield_quadrature_oracle,
)

COMMANDS = ("eigen", "trace", "beats", "yield", "hmf", "sweep-b", "sweep-a", "sweep-kr", "check")
EX_OK, EX_INVALID, EX_NUMERIC, EX_USAGE = 0, 1, 2, 64
ORACLE_ATOL = 1e-6

USAGE = "usage: radpair {" + ",".join(COMMANDS) + "} [options]\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError([message])


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("system")
    g.add_argument("--config", type=Path, help="JSON run configuration")
    g.add_argument("--a", type=float, nargs="+", metavar="A_UT",
                   help="isotropic hyperfine constants in uT (replaces the config's nuclei)")
    g.add_argument("--spin", default="1/2", help="spin of every --a nucleus (default 1/2)")
    g.add_argument("--electron", default="A", choices=["A", "B"], help="electron the --a nuclei couple to")
    g.add_argument("--gamma-e", type=float, dest="gamma_e", help="electron magnetogyric ratio, s^-1 T^-1")
    g.add_argument("--B", type=float, dest="B", help="field in uT")
    g.add_argument("--k", type=float, help="reaction rate, s^-1")
    g.add_argument("--r", type=float, help="relaxation rate, s^-1")
    g.add_argument("--born", choices=["S", "T"])
    g.add_argument("--channel", choices=["S", "T"])
    g.add_argument("--b-hmf", type=float, dest="b_hmf", help="hypomagnetic field, uT (default 1)")
    g.add_argument("--b-gmf", type=float, dest="b_gmf", help="geomagnetic field, uT (default 50)")
    o = p.add_argument_group("output")
    o.add_argument("--output", "-o", help="output file (default stdout)")
    o.add_argument("--format", choices=["csv", "jsonl", "json"])


def _add_grid(p, name, help_text):
    p.add_argument(f"--{name}-grid", dest="grid_" + name, nargs=3, type=float, metavar=("START", "STOP", "NUM"),
                   help=help_text)
    p.add_argument(f"--{name}-spacing", dest="spacing_" + name, choices=["linear", "log"], default="log")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="radpair", description="Radical pair yields and hypomagnetic field effects")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("eigen", help="eigenlevels overlapping the singlet initial state")
    _add_common(p)
    _add_grid(p, "B", "field grid in uT")
    p.add_argument("--nucleus-up", action="store_true", help="fix every nucleus in its highest-m state")

    for name, text in (("trace", "singlet probability against time"), ("beats", "spectrum of the singlet trace")):
        p = sub.add_parser(name, help=text)
        _add_common(p)
        p.add_argument("--samples", type=int, default=4096)
        p.add_argument("--span", type=float, default=10e-6, help="trace length in seconds")

    for name, text in (("yield", "one reaction yield"), ("hmf", "hypomagnetic field effect in percent")):
        p = sub.add_parser(name, help=text)
        _add_common(p)

    p = sub.add_parser("sweep-b", help="yield over a field grid")
    _add_common(p)
    _add_grid(p, "B", "field grid in uT (default: 0 plus 60 log points over 0.1..1e4)")

    p = sub.add_parser("sweep-a", help="effect over a hyperfine grid for several (k, r) pairs")
    _add_common(p)
    _add_grid(p, "a", "hyperfine grid in uT (default: 60 log points over 10..1e6)")
    p.add_argument("--rates", nargs="+", metavar="K:R", help="rate pairs, e.g. 1e6:1e4")

    p = sub.add_parser("sweep-kr", help="effect over a (k, r) map")
    _add_common(p)
    _add_grid(p, "k", "k grid in s^-1 (default: 61 log points over 1e3..1e9)")
    _add_grid(p, "r", "r grid in s^-1 (default: 61 log points over 1e3..1e9)")
    p.add_argument("--workers", type=int, help="worker threads (default $RADPAIR_WORKERS or all cores)")

    p = sub.add_parser("check", help="printed-matrix, closed-form eigenstate and quadrature diagnostics")
    _add_common(p)
    return parser


def _load(args) -> RunConfig:
    data: dict = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except OSError as exc:
            raise ConfigError([f"config: {exc}"]) from exc
        except json.JSONDecodeError as exc:
            raise ConfigError([f"config: invalid JSON ({exc})"]) from exc
        if not isinstance(data, dict):
            raise ConfigError(["config: top level must be an object"])
    if args.a is not None:
        data["nuclei"] = [{"spin": args.spin, "a_iso_uT": a, "electron": args.electron} for a in args.a]
    overrides = {
        ("constants", "gamma_e_per_s_per_T"): args.gamma_e,
        ("kinetics", "B_uT"): args.B,
        ("kinetics", "k_per_s"): args.k,
        ("kinetics", "r_per_s"): args.r,
        ("defaults", "B_hmf_uT"): args.b_hmf,
        ("defaults", "B_gmf_uT"): args.b_gmf,
        ("output", "path"): args.output,
        ("output", "format"): args.format,
    }
    for (section, key), value in overrides.items():
        if value is not None:
            data.setdefault(section, {})[key] = value
    for key in ("born", "channel"):
        if getattr(args, key) is not None:
            data[key] = getattr(args, key)
    for name in ("B", "a", "k", "r"):
        grid = getattr(args, "grid_" + name, None)
        if grid is not None:
            start, stop, num = grid
            if num != int(num):
                raise ConfigError([f"--{name}-grid: NUM must be an integer"])
            unit = {"B": "B_uT", "a": "a_uT", "k": "k_per_s", "r": "r_per_s"}[name]
            data.setdefault("grids", {})[unit] = {
                "start": start, "stop": stop, "num": int(num), "spacing": getattr(args, "spacing_" + name)}
    return config_from_dict(data)


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(format_value(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _finite(x):
    return None if x is None or not np.isfinite(x) else float(x)


def _params(cfg: RunConfig) -> dict:
    return {
        "nuclei": cfg.spec.to_dict()["nuclei"],
        "B_uT": cfg.kinetics.B_uT,
        "k_per_s": cfg.kinetics.k_per_s,
        "r_per_s": cfg.kinetics.r_per_s,
        "gamma_e_per_s_per_T": cfg.constants.gamma_e,
    }


def cmd_eigen(cfg, args) -> str:
    grid = cfg.grids.get("B_uT")
    fields = grid.values if grid is not None else (cfg.kinetics.B_uT,)
    selector = [0] * len(cfg.spec.nuclei) if args.nucleus_up else None
    rows = []
    for B in fields:
        for lvl in singlet_overlap_levels(cfg.spec, B, selector, cfg.constants):
            rows.append((float(B), lvl.index, lvl.energy_ut, lvl.weight))
    return _csv(["B_uT", "level_index", "energy_uT", "overlap_weight"], rows)


def _trace(cfg, args):
    if args.samples < 2 or args.span <= 0:
        raise ConfigError(["--samples must be >= 2 and --span > 0"])
    times = default_times(args.samples, args.span)
    return singlet_probability_trace(cfg.spec, cfg.kinetics.B_uT, cfg.kinetics.r_per_s, times, cfg.constants)


def cmd_trace(cfg, args) -> str:
    tr = _trace(cfg, args)
    return _csv(["t_s", "p_singlet"], zip(tr.times.tolist(), tr.probabilities.tolist()))


def cmd_beats(cfg, args) -> str:
    try:
        peaks = beat_spectrum(_trace(cfg, args))
    except ValueError as exc:
        raise ConfigError([str(exc)]) from exc
    return _csv(["freq_hz", "amplitude"], peaks)


def cmd_yield(cfg, args) -> str:
    res = yield_any(cfg.spec, KineticParams(cfg.kinetics.k_per_s, cfg.kinetics.r_per_s, cfg.kinetics.B_uT),
                    cfg.born, cfg.channel, cfg.constants)
    return _json({"phi": res.phi, "born": res.born.value, "channel": res.channel.value, "params": _params(cfg)})


def cmd_hmf(cfg, args) -> str:
    k, r = cfg.kinetics.k_per_s, cfg.kinetics.r_per_s
    value = hmf_effect(cfg.spec, k, r, cfg.born, cfg.channel, cfg.contrast, cfg.constants)
    params = _params(cfg)
    del params["B_uT"]
    params.update(B_hmf_uT=cfg.contrast.B_hmf, B_gmf_uT=cfg.contrast.B_gmf)
    return _json({"delta_percent": value, "born": cfg.born.value, "channel": cfg.channel.value, "params": params})


def _records(records, fmt) -> str:
    return records_to_jsonl(records) if fmt in ("jsonl", "json") else records_to_csv(records)


def cmd_sweep_b(cfg, args) -> str:
    grid = cfg.grids.get("B_uT") or default_field_grid()
    recs = sweep_field(cfg.spec, cfg.kinetics.k_per_s, cfg.kinetics.r_per_s, cfg.born, cfg.channel, grid,
                       cfg.constants)
    return _records(recs, cfg.output.format)


def _rate_pairs(items):
    if not items:
        return DEFAULT_FIELD_RATES
    pairs = []
    for item in items:
        try:
            k, r = (float(x) for x in item.split(":"))
        except ValueError as exc:
            raise ConfigError([f"--rates: cannot parse {item!r}, expected K:R"]) from exc
        if not (k > 0 and r >= 0):
            raise ConfigError([f"--rates: need k > 0 and r >= 0, got {item!r}"])
        pairs.append((k, r))
    return pairs


def cmd_sweep_a(cfg, args) -> str:
    if len(cfg.spec.nuclei) != 1:
        raise ConfigError(["sweep-a needs exactly one nucleus"])
    grid = cfg.grids.get("a_uT") or default_hyperfine_grid()
    recs = sweep_hyperfine(cfg.spec, _rate_pairs(args.rates), grid, cfg.contrast, cfg.born, cfg.channel,
                           cfg.constants)
    return _records(recs, cfg.output.format)


def cmd_sweep_kr(cfg, args) -> str:
    kg = cfg.grids.get("k_per_s") or default_rate_grid("k_per_s")
    rg = cfg.grids.get("r_per_s") or default_rate_grid("r_per_s")
    if kg.values[0] <= 0 or rg.values[0] < 0:
        raise ConfigError(["sweep-kr: k grid must be > 0 and r grid >= 0"])
    recs = sweep_kr(cfg.spec, kg, rg, cfg.born, cfg.channel, cfg.contrast, cfg.constants, workers=args.workers)
    return _records(recs, cfg.output.format)


def check_report(cfg: RunConfig) -> dict:
    report: dict = {}
    nuc = cfg.spec.nuclei
    B = cfg.kinetics.B_uT
    if len(nuc) == 1 and nuc[0].spin.twice_spin == 1 and nuc[0].electron.value == "A":
        a = nuc[0].a_iso_ut
        report["printed_matrix"] = [
            {"row": m.row, "col": m.col, "built_uT": m.built, "printed_uT": m.printed}
            for m in printed_matrix_diagnostic(a, B)
        ]
        report["analytic_eigenstates"] = [
            {"state": r.state, "norm": _finite(r.norm), "rayleigh_uT": _finite(r.rayleigh_ut),
             "residual_uT": _finite(r.residual_ut), "best_overlap": _finite(r.best_overlap)}
            for r in analytic_eigvec_residuals(a, B)
        ]
    params = KineticParams(cfg.kinetics.k_per_s, cfg.kinetics.r_per_s, B)
    oracle = []
    for born in ("S", "T"):
        closed = _singlet_yield(cfg.spec, params, born, cfg.constants)
        quad = yield_quadrature_oracle(cfg.spec, params, born, cfg.constants)
        oracle.append({"born": born, "closed_form": closed, "quadrature": quad, "abs_diff": abs(closed - quad)})
    report["oracle"] = oracle
    report["oracle_ok"] = all(o["abs_diff"] < ORACLE_ATOL for o in oracle)
    report["params"] = _params(cfg)
    return report


def cmd_check(cfg, args) -> str:
    return _json(check_report(cfg))


HANDLERS = {
    "eigen": cmd_eigen, "trace": cmd_trace, "beats": cmd_beats, "yield": cmd_yield, "hmf": cmd_hmf,
    "sweep-b": cmd_sweep_b, "sweep-a": cmd_sweep_a, "sweep-kr": cmd_sweep_kr, "check": cmd_check,
}


def _emit(text: str, cfg: RunConfig, argv) -> None:
    if cfg.output.path is None:
        sys.stdout.write(text)
        return
    path = Path(cfg.output.path)
    path.write_text(text)
    sidecar = path.with_name(path.name + ".provenance.json")
    sidecar.write_text(_json({
        "argv": list(argv),
        "version": __version__,
        "spec_hash": cfg.spec.digest(),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }))


def run_command(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] in ("-h", "--help", "--version"):
        try:
            build_parser().parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
    if not argv or argv[0] not in COMMANDS:
        sys.stderr.write(USAGE)
        return EX_USAGE
    try:
        try:
            args = build_parser().parse_args(argv)
        except SystemExit as exc:  # --help inside a subcommand
            return int(exc.code or 0)
        cfg = _load(args)
        text = HANDLERS[args.command](cfg, args)
        if args.command == "check" and not json.loads(text)["oracle_ok"]:
            _emit(text, cfg, argv)
            return EX_NUMERIC
        _emit(text, cfg, argv)
        return EX_OK
    except ConfigError as exc:
        for err in exc.errors:
            sys.stderr.write(f"error: {err}\n")
        return EX_INVALID
    except (EigenSolverError, YieldRangeError, UndefinedEffectError, QuadratureBudgetError,
            FloatingPointError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EX_NUMERIC
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EX_INVALID


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
