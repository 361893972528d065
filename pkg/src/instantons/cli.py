"""
Command-line front end.

Every document starts with a metadata object holding the schema version,
the package version, the resolved parameters and the potential
normalization.  JSON output puts it under ``metadata``; CSV output writes
it as one ``# metadata: {...}`` comment line above the header.

Exit status: 0 on success, 1 when the configuration is invalid, 2 when a
numerical stage fails.  Errors are one JSON line on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__, dilute_gas, fluctuations, instanton, selftest, spectral_oracle
from .errors import InstantonError
from .potentials import NORMALIZATIONS, PotentialModel

SCHEMA_VERSION = 1
DEFAULT_OMEGA = 10.0
DEFAULT_OMEGA_T = 30.0
DEFAULT_RANGE = "4:30:2"


class ConfigError(Exception):
    pass


class StageError(Exception):
    def __init__(self, operation, exc):
        super().__init__(str(exc))
        self.operation = operation
        self.exc = exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _positive(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def parse_range(text: str) -> list[float]:
    """'start:stop:step' with stop included when it lies on the lattice."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"range entries must be numbers, got {text!r}")
    if not (start > 0 and step > 0 and stop >= start) or not all(map(math.isfinite, (start, stop, step))):
        raise ConfigError(f"range needs 0 < start <= stop and step > 0, got {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    if count > 10000:
        raise ConfigError(f"range {text!r} has {count} points; limit is 10000")
    # multiply rather than accumulate so values are reproducible
    return [start + i * step for i in range(count)]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--omega", type=_positive, default=DEFAULT_OMEGA,
                        help="frequency parameter omega (default: %(default)s)")
    common.add_argument("--T", dest="T", type=_positive, default=None,
                        help=f"euclidean time interval (default: {DEFAULT_OMEGA_T:g}/omega)")
    common.add_argument("--L", dest="L", type=_positive, default=3.0,
                        help="oracle grid half-width (default: %(default)s)")
    common.add_argument("--N", dest="N", type=_positive_int, default=4000,
                        help="oracle grid points (default: %(default)s)")
    common.add_argument("--nu", type=_positive, default=None,
                        help="reference oscillator frequency (default: 3*omega/2)")
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="output format (default: %(default)s)")
    common.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")

    parser = _Parser(prog="instantons", description="Instanton calculus for the triple-well potential.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("profile", parents=[common], help="instanton profile samples (tau, x_c, dx_c/dtau)")
    p.add_argument("--family", choices=("triple_well", "double_well"), default="triple_well",
                   help="potential family (default: %(default)s)")
    p.add_argument("--span", type=_positive, default=None,
                   help="sample |tau| <= span (default: 10/omega)")
    p.add_argument("--samples", type=_positive_int, default=201,
                   help="number of samples, odd so tau = 0 is included (default: %(default)s)")
    p.add_argument("--closed-form", action="store_true",
                   help="use the closed form instead of quadrature (triple well only)")

    p = sub.add_parser("action", parents=[common], help="instanton action by two quadratures")
    p.add_argument("--family", choices=("triple_well", "double_well"), default="triple_well",
                   help="potential family (default: %(default)s)")

    p = sub.add_parser("determinant", parents=[common], help="Gelfand-Yaglom determinant report")
    p.add_argument("--numeric-lambda", action="store_true",
                   help="also diagonalize for the lowest eigenvalue on --N points")

    p = sub.add_parser("density", parents=[common], help="instanton density and predicted levels")
    p.add_argument("--sweep", action="store_true", help="tabulate over --omega-range")
    p.add_argument("--omega-range", default=DEFAULT_RANGE,
                   help="start:stop:step, stop inclusive (default: %(default)s)")

    sub.add_parser("spectrum", parents=[common], help="predicted dilute-gas triplet")

    p = sub.add_parser("oracle", parents=[common], help="exact levels by grid diagonalization")
    p.add_argument("--levels", type=_positive_int, default=3, help="number of levels (default: %(default)s)")

    sub.add_parser("compare", parents=[common], help="exact versus predicted levels")

    p = sub.add_parser("sweep", parents=[common], help="density, predicted and exact triplets over omega")
    p.add_argument("--omega-range", default=DEFAULT_RANGE,
                   help="start:stop:step, stop inclusive (default: %(default)s)")

    p = sub.add_parser("selftest", parents=[common], help="run the invariant checks")
    p.add_argument("--check-file", type=Path, default=None,
                   help="revalidate a determinant JSON document instead")
    return parser


def _resolve(args) -> dict:
    params = {
        "command": args.command,
        "omega": args.omega,
        "T": args.T if args.T is not None else DEFAULT_OMEGA_T / args.omega,
        "L": args.L,
        "N": args.N,
        "nu": args.nu if args.nu is not None else 1.5 * args.omega,
        "format": args.format,
    }
    for key in ("family", "span", "samples", "closed_form", "numeric_lambda", "sweep",
                "omega_range", "levels"):
        if hasattr(args, key):
            params[key] = getattr(args, key)
    if params.get("span", 0) is None:
        params["span"] = 10.0 / args.omega
    if args.command == "selftest":
        params["check_file"] = str(args.check_file) if args.check_file else None
    return params


def _validate(params):
    if params["N"] < 200:
        raise ConfigError("--N must be at least 200")
    if params["command"] == "profile":
        if params["samples"] % 2 == 0 or params["samples"] < 3:
            raise ConfigError("--samples must be odd and at least 3")
        if params["closed_form"] and params["family"] != "triple_well":
            raise ConfigError("--closed-form is only available for the triple well")
    if params["command"] == "determinant" and params["omega"] * params["T"] < 20.0:
        raise ConfigError(f"omega*T = {params['omega'] * params['T']:g} must be at least 20")
    if params["command"] in ("oracle", "compare", "sweep"):
        omegas = [params["omega"]]
        if params["command"] == "sweep":
            omegas = parse_range(params["omega_range"])
        spacing = 2.0 * params["L"] / (params["N"] - 1)
        if not spacing < 0.1 / max(omegas):
            raise ConfigError(f"grid spacing {spacing:.4g} does not resolve omega = {max(omegas):g}")
    if params["command"] == "density" and params["sweep"]:
        parse_range(params["omega_range"])


def _metadata(params, family="triple_well", notes=()):
    return {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "parameters": params,
        "normalization": NORMALIZATIONS[family],
        "warnings": list(notes),
    }


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _plain(obj):
    """Recursively convert numpy scalars and tuples to JSON-native types."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _render(meta, result, columns=None, rows=None, fmt="json") -> str:
    if fmt == "json":
        doc = {"metadata": meta, "result": result}
        if rows is not None:
            doc["columns"] = list(columns)
            doc["rows"] = rows
        return json.dumps(_plain(doc), indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write("# metadata: " + json.dumps(_plain(meta), separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    if rows is None:
        columns = ["quantity", "value"]
        rows = [[k, v] for k, v in _flatten(_plain(result))]
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{i}.")
    else:
        yield prefix[:-1], obj


def _stage(operation, func, *args, **kwargs):
    try:
        return func(*args, **kwargs)
    except (InstantonError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise StageError(operation, exc) from exc


def _model(family, omega):
    return PotentialModel(family, omega)


def cmd_profile(p, notes):
    model = _model(p["family"], p["omega"])
    lo, hi = (-1.0, 1.0) if p["family"] == "double_well" else (0.0, 1.0)
    if p["closed_form"]:
        prof = instanton.closed_form_instanton(p["omega"])
    else:
        prof = _stage("numeric_instanton", instanton.numeric_instanton, model, lo, hi)
    half = (p["samples"] - 1) // 2
    taus = p["span"] * np.arange(-half, half + 1) / half
    x = prof(taus)
    v = prof.velocity(taus)
    rows = [[float(t), float(a), float(b)] for t, a, b in zip(taus, x, v)]
    result = {
        "kind": prof.kind,
        "endpoints": prof.endpoints,
        "action": prof.action,
        "decay_rates": prof.decay_rates,
        "amplitude_constants": prof.amplitude_constants,
    }
    return result, ["tau", "x_c", "dx_c_dtau"], rows


def cmd_action(p, notes):
    model = _model(p["family"], p["omega"])
    lo, hi = (-1.0, 1.0) if p["family"] == "double_well" else (0.0, 1.0)
    prof = _stage("numeric_instanton", instanton.numeric_instanton, model, lo, hi)
    tau_action = _stage("action_tau_integral", instanton.action_tau_integral, prof)
    closed = p["omega"] / 4.0 if p["family"] == "triple_well" else 2.0 * p["omega"] / 3.0
    taus = np.linspace(-20.0 * prof.scale, 20.0 * prof.scale, 4001)
    return {
        "action_x_quadrature": prof.action,
        "action_tau_quadrature": tau_action,
        "action_closed_form": closed,
        "bogomolnyi_residual": instanton.bogomolnyi_residual(prof, taus),
    }, None, None


def cmd_determinant(p, notes):
    grid = p["N"] if p["numeric_lambda"] else None
    report = _stage("determinant_report", fluctuations.determinant_report, p["omega"], p["T"], p["nu"], grid)
    return report.to_dict(), None, None


def _density_row(omega):
    spec = dilute_gas.predicted_spectrum(omega)
    return [omega, spec.action, spec.density, *spec.levels]


def cmd_density(p, notes):
    columns = ["omega", "action", "density", "E0", "E1", "E2"]
    if p["sweep"]:
        rows = [_density_row(w) for w in parse_range(p["omega_range"])]
        return {"points": len(rows)}, columns, rows
    spec = dilute_gas.predicted_spectrum(p["omega"])
    return {
        "omega": spec.omega,
        "action": spec.action,
        "density": spec.density,
        "log_density": math.log(spec.density),
        "mean_separation": 1.0 / spec.density,
        "dilute": spec.dilute,
    }, None, None


def cmd_spectrum(p, notes):
    spec = dilute_gas.predicted_spectrum(p["omega"])
    out = spec.to_dict()
    out["splitting"] = spec.levels[2] - spec.levels[0]
    return out, None, None


def cmd_oracle(p, notes):
    grid = spectral_oracle.GridSpec(p["L"], p["N"])
    spec = _stage("diagonalize", spectral_oracle.diagonalize, PotentialModel.triple_well(p["omega"]),
                  grid, p["levels"])
    rows = [[n, e, par.value, leak] for n, (e, par, leak)
            in enumerate(zip(spec.energies, spec.parities, spec.boundary_leakage))]
    return spec.to_dict(), ["level", "energy", "parity", "boundary_leakage"], rows


def cmd_compare(p, notes):
    grid = spectral_oracle.GridSpec(p["L"], p["N"])
    table = _stage("compare_report", spectral_oracle.compare_report, p["omega"], grid)
    rows = [[r["level"], r["exact"], r["parity"], r["predicted"], r["difference"]] for r in table.rows]
    return table.summary(), ["level", "exact", "parity", "predicted", "difference"], rows


def cmd_sweep(p, notes):
    grid = spectral_oracle.GridSpec(p["L"], p["N"])
    columns = ["omega", "action", "density", "dilute", "predicted_E0", "predicted_E1", "predicted_E2",
               "exact_E0", "exact_E1", "exact_E2", "parity_0", "parity_1", "parity_2"]
    rows = []
    for omega in parse_range(p["omega_range"]):
        spec = dilute_gas.predicted_spectrum(omega)
        exact = _stage("diagonalize", spectral_oracle.diagonalize, PotentialModel.triple_well(omega), grid, 3)
        rows.append([omega, spec.action, spec.density, spec.dilute, *spec.levels,
                     *exact.energies, *(par.value for par in exact.parities)])
    return {"points": len(rows)}, columns, rows


def cmd_selftest(p, notes):
    if p["check_file"]:
        try:
            document = json.loads(Path(p["check_file"]).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {p['check_file']}: {exc}")
        results = _stage("check_determinant_document", selftest.check_determinant_document, document)
    else:
        results = _stage("selftest", selftest.run_all)
    rows = [[r.name, r.passed, r.value, r.limit, r.detail] for r in results]
    summary = {"passed": sum(r.passed for r in results), "total": len(results),
               "all_passed": all(r.passed for r in results)}
    return summary, ["check", "passed", "value", "limit", "detail"], rows


COMMANDS = {
    "profile": cmd_profile,
    "action": cmd_action,
    "determinant": cmd_determinant,
    "density": cmd_density,
    "spectrum": cmd_spectrum,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "selftest": cmd_selftest,
}


def _error_line(kind, operation, exc):
    return json.dumps({"status": "error", "kind": kind, "operation": operation,
                       "error": type(exc).__name__, "message": str(exc)}, sort_keys=True)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        params = _resolve(args)
        _validate(params)
    except ConfigError as exc:
        print(_error_line("validation", "parse_arguments", exc), file=sys.stderr)
        return 1

    notes = []
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            result, columns, rows = COMMANDS[args.command](params, notes)
        notes.extend(f"{w.category.__name__}: {w.message}" for w in caught)
    except ConfigError as exc:
        print(_error_line("validation", args.command, exc), file=sys.stderr)
        return 1
    except StageError as exc:
        print(_error_line("numerical", exc.operation, exc.exc), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(_error_line("validation", args.command, exc), file=sys.stderr)
        return 1

    family = params.get("family", "triple_well")
    text = _render(_metadata(params, family, notes), result, columns, rows, params["format"])
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
    if args.command == "selftest" and not result["all_passed"]:
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
