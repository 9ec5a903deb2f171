"""Command-line front end.

Usage examples:
  # regime of one parameter set (exit code encodes the regime)
  python src/cli.py classify --n -10 --alpha 10 --c 1 --cu 1 --b 1 --r 1

  # velocity profile as CSV; --partial allows the axis-anchored profile
  # when no classical solution reaches the wall
  python src/cli.py profile --n -3 --alpha 2 --c 1 --cu 1 --b 1 --partial --format csv --out u.csv

  # regime map over a parameter grid, 4 worker threads, rows in grid order
  python src/cli.py sweep --n -3 --alpha 2 --cu 1 --b 1 --sweep-c 0.5:1:11 --workers 4 --format csv

  # unsteady bounds
  python src/cli.py bounds --n -1 --alpha 2 --c 0.5 --cu 1 --m 0.1

  python src/cli.py selftest

Exit codes: 0 smooth/Newtonian/trivial (and successful sweeps, bounds and
selftests), 10 boundary singular, 20 generalized with interior singular point,
30 no classical solution, 2 invalid input, 1 failed selftest.

Numbers are written with 17 significant digits; unbounded U_YY markers are
written as "inf".
"""

import argparse
import csv
import io
import itertools
import json
import logging
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from enum import Enum

import numpy as np
from pydantic import BaseModel, ValidationError

from config_manager import ConfigError, ConfigManager
from config_schema import SWEEP_PARAMS, FluidParams, FlowParams, UnsteadyData
from flow_profile import partial_profile, velocity_profile
from model import PoiseuilleError
from regime import Regime, classify
from selftest import run_selftest
from unsteady import bounds_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_SELFTEST_FAILED = 1
EXIT_INVALID = 2
EXIT_NO_SOLUTION = Regime.NO_CLASSICAL_SOLUTION.exit_code

FLUID_KEYS = ('n', 'alpha', 'c', 'cu')
PROFILE_COLUMNS = ('Y', 'U', 'U_Y', 'U_YY')
SWEEP_COLUMNS = SWEEP_PARAMS + ('regime', 'regime_code', 'zeta1', 'f_zeta1',
                                'existence_margin', 'critical_gradient')


# ── Formatting ───────────────────────────────────────────────────────────────

def fmt(value):
    """Text form of one value: 17 significant digits, "inf" markers, "" for None.

    Adding 0.0 turns -0.0 into 0.0.
    """
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(float(value) + 0.0, '.17g')
    return str(value)


def jsonable(obj):
    """Recursively convert reports to JSON-safe values (inf -> "inf")."""
    if isinstance(obj, BaseModel):
        return jsonable(obj.model_dump())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) + 0.0 if math.isfinite(obj) else fmt(obj)
    return obj


def write_output(text, out):
    if out:
        with open(out, 'w', newline='') as f:
            f.write(text)
        logger.info(f"wrote {out}")
    else:
        sys.stdout.write(text)


def _json_text(payload):
    return json.dumps(jsonable(payload), indent=2) + "\n"


def _key_value_csv(pairs):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(['key', 'value'])
    for key, value in pairs:
        writer.writerow([key, fmt(value)])
    return buf.getvalue()


def _flatten(prefix, obj):
    if isinstance(obj, dict):
        for key, value in obj.items():
            yield from _flatten(f"{prefix}.{key}" if prefix else str(key), value)
    elif isinstance(obj, (list, tuple)) and not all(isinstance(v, (int, float)) for v in obj):
        for i, value in enumerate(obj):
            yield from _flatten(f"{prefix}.{i}", value)
    elif isinstance(obj, (list, tuple)):
        yield prefix, " ".join(fmt(v) for v in obj)
    else:
        yield prefix, obj


# ── Commands ─────────────────────────────────────────────────────────────────

def _require(config, names):
    missing = config.missing(names)
    if missing:
        raise ConfigError(f"missing {', '.join('--' + k for k in missing)}")


def _params(config, flow):
    params = {k: getattr(config, k) for k in FLUID_KEYS}
    params.update(b=flow.signed_b, r=flow.r, rel_tol=config.rel_tol, abs_tol=config.abs_tol,
                  eq_tol=config.eq_tol, max_iter=config.max_iter)
    return params


def classify_payload(report, config):
    return {
        'params': _params(config, report.flow),
        'regime': report.regime,
        'theorem': report.theorem,
        'critical_points': report.critical,
        'margins': {
            'existence_margin': report.existence_margin,
            'inflection_margin': report.inflection_margin,
            'discriminant': report.discriminant,
            'discriminant_lhs': report.discriminant_lhs,
            'discriminant_rhs': report.discriminant_rhs,
            'critical_gradient': report.critical_gradient,
        },
        'diagnostics': {'notes': list(report.notes), 'exit_code': report.exit_code},
    }


def cmd_classify(config):
    _require(config, FLUID_KEYS + ('b',))
    report = classify(config.fluid(), config.flow(), config.eval_settings())
    payload = classify_payload(report, config)
    if config.format == 'csv':
        write_output(_key_value_csv(_flatten('', jsonable(payload))), config.out)
    else:
        write_output(_json_text(payload), config.out)
    return report.exit_code


def profile_header(profile, config, flow):
    header = dict(_params(config, flow))
    header.update(
        regime=profile.regime,
        grid=config.grid,
        y_end=profile.y_end,
        singular_points=" ".join(fmt(y) for y in profile.singular_points),
        max_residual=profile.max_residual,
        quadrature_error=profile.quadrature_error,
        undetermined_constant=profile.undetermined_constant,
    )
    return header


def cmd_profile(config):
    _require(config, FLUID_KEYS + ('b',))
    fluid, flow, s = config.fluid(), config.flow(), config.eval_settings()
    q = config.quadrature_settings()
    report = classify(fluid, flow, s)
    if report.regime is Regime.NO_CLASSICAL_SOLUTION:
        if not config.partial:
            print(f"no classical solution: bR/2 = {fmt(flow.half_wall_stress)} exceeds the flux "
                  f"maximum {fmt(report.critical.flux_supremum)} (use --partial)", file=sys.stderr)
            return EXIT_NO_SOLUTION
        profile = partial_profile(fluid, flow, q, s)
    else:
        profile = velocity_profile(fluid, flow, q, s)

    header = profile_header(profile, config, flow)
    columns = (profile.grid, profile.u, profile.u_y, profile.u_yy)
    if config.format == 'csv':
        buf = io.StringIO()
        for key, value in header.items():
            buf.write(f"# {key}={fmt(value)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(PROFILE_COLUMNS)
        for row in zip(*columns):
            writer.writerow([fmt(v) for v in row])
        write_output(buf.getvalue(), config.out)
    else:
        payload = {
            'params': _params(config, flow),
            'regime': profile.regime,
            'diagnostics': {k: v for k, v in header.items() if k not in _params(config, flow)},
            'profile': dict(zip(PROFILE_COLUMNS, columns)),
        }
        write_output(_json_text(payload), config.out)
    return report.exit_code


def sweep_row(point, s):
    """Classification summary of one grid point; invalid points become rows too."""
    row = dict(zip(SWEEP_PARAMS, point))
    try:
        fluid = FluidParams(**{k: row[k] for k in FLUID_KEYS})
        flow = FlowParams.from_signed(row['b'], row['r'])
        report = classify(fluid, flow, s)
    except (PoiseuilleError, ValidationError) as e:
        logger.warning(f"sweep point {row} rejected: {e}")
        row.update(regime='Invalid', regime_code=EXIT_INVALID)
        return row
    row.update(
        regime=report.regime,
        regime_code=report.exit_code,
        zeta1=report.critical.zeta1,
        f_zeta1=report.critical.f_at_zeta1,
        existence_margin=report.existence_margin,
        critical_gradient=report.critical_gradient,
    )
    return row


def sweep_points(config):
    axes = []
    for name in SWEEP_PARAMS:
        if name in config.sweep:
            axes.append([float(v) for v in config.sweep[name].values()])
        else:
            axes.append([getattr(config, name)])
    return list(itertools.product(*axes))


def cmd_sweep(config):
    if not config.sweep:
        raise ConfigError("sweep needs at least one --sweep-<param> MIN:MAX:STEPS")
    _require(config, FLUID_KEYS + ('b',))
    s = config.eval_settings()
    points = sweep_points(config)
    logger.info(f"sweeping {len(points)} points with {config.workers} worker(s)")
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(lambda point: sweep_row(point, s), points))
    else:
        rows = [sweep_row(point, s) for point in points]

    if config.format == 'csv':
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([fmt(row.get(col)) for col in SWEEP_COLUMNS])
        write_output(buf.getvalue(), config.out)
    else:
        payload = {
            'params': {'sweep': {k: v.model_dump() for k, v in config.sweep.items()},
                       'rel_tol': config.rel_tol, 'abs_tol': config.abs_tol,
                       'eq_tol': config.eq_tol, 'max_iter': config.max_iter},
            'rows': rows,
        }
        write_output(_json_text(payload), config.out)
    return EXIT_OK


def read_psi_file(path):
    """Two-column CSV (Y, Psi); '#' comments and one text header are skipped."""
    with open(path) as f:
        lines = [line for line in f if line.strip() and not line.lstrip().startswith('#')]
    if lines:
        try:
            float(lines[0].split(',')[0])
        except ValueError:
            lines = lines[1:]
    if not lines:
        raise ConfigError(f"{path}: no Psi samples")
    try:
        table = np.loadtxt(lines, delimiter=',', ndmin=2)
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e
    if table.shape[1] < 2:
        raise ConfigError(f"{path}: expected two columns Y, Psi")
    return table[:, 0], table[:, 1]


def unsteady_data(config):
    if config.sup_f is None:
        if config.psi_file:
            raise ConfigError("--psi-file needs --sup-f")
        return None
    if config.psi_file:
        radii, values = read_psi_file(config.psi_file)
        try:
            sampled = UnsteadyData.from_samples(radii, values, config.r, config.sup_f, config.beta)
        except ValueError as e:
            raise ConfigError(f"{config.psi_file}: {e}") from e
        return sampled.model_copy(update={
            'sup_psi_prime': max(sampled.sup_psi_prime, config.sup_psi_prime),
            'sup_psi_weighted': max(sampled.sup_psi_weighted, config.sup_psi_weighted),
        })
    return UnsteadyData(sup_f=config.sup_f, sup_psi_prime=config.sup_psi_prime,
                        sup_psi_weighted=config.sup_psi_weighted, beta=config.beta)


def cmd_bounds(config):
    _require(config, FLUID_KEYS)
    if config.m is None and config.sup_f is None:
        raise ConfigError("bounds need --m or --sup-f")
    fluid, s = config.fluid(), config.eval_settings()
    report = bounds_report(fluid, config.r, unsteady_data(config), s, m=config.m)
    params = {k: getattr(config, k) for k in FLUID_KEYS}
    params.update(r=config.r, m=config.m, sup_f=config.sup_f, sup_psi_prime=config.sup_psi_prime,
                  sup_psi_weighted=config.sup_psi_weighted, psi_file=config.psi_file, beta=config.beta)
    payload = {'params': params, 'bounds': report}
    if config.format == 'csv':
        write_output(_key_value_csv(_flatten('', jsonable(payload))), config.out)
    else:
        write_output(_json_text(payload), config.out)
    return EXIT_OK


def cmd_selftest(config):
    results = run_selftest(config.eval_settings(), config.quadrature_settings())
    failed = [r for r in results if not r.passed]
    lines = [r.line() for r in results]
    lines.append(f"{len(results) - len(failed)}/{len(results)} checks passed")
    write_output("\n".join(lines) + "\n", config.out)
    return EXIT_SELFTEST_FAILED if failed else EXIT_OK


COMMANDS = {
    'classify': cmd_classify,
    'profile': cmd_profile,
    'sweep': cmd_sweep,
    'bounds': cmd_bounds,
    'selftest': cmd_selftest,
}


# ── Argument parsing ─────────────────────────────────────────────────────────

def build_parser():
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--config", default=None, help="Flat YAML file of option values; flags override it.")
    common.add_argument("--verbose", action="store_true", help="Debug logging on stderr.")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--out", default=None, help="Output path (default stdout).")
    common.add_argument("--rel-tol", type=float, default=None)
    common.add_argument("--abs-tol", type=float, default=None)
    common.add_argument("--eq-tol", type=float, default=None,
                        help="Relative band inside which regime-defining quantities count as equal.")
    common.add_argument("--max-iter", type=int, default=None)
    common.add_argument("--grid", type=int, default=None, help="Profile grid points (default 101).")

    fluid = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    fluid.add_argument("--n", type=float, default=None, help="Power-law index.")
    fluid.add_argument("--alpha", type=float, default=None, help="Yasuda exponent (> 0).")
    fluid.add_argument("--c", type=float, default=None, help="Viscosity ratio in [0, 1].")
    fluid.add_argument("--cu", type=float, default=None, help="Carreau number (>= 0).")
    fluid.add_argument("--r", type=float, default=None, help="Pipe radius (default 1).")

    flow = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    flow.add_argument("--b", type=float, default=None, help="Normalized pressure gradient (signed).")

    parser = argparse.ArgumentParser(
        prog="carreau-poiseuille", allow_abbrev=False,
        description="Regimes, profiles and a-priori bounds of Carreau-Yasuda pipe Poiseuille flow.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("classify", parents=[common, fluid, flow], allow_abbrev=False,
                   help="Classify the steady problem.")
    profile = sub.add_parser("profile", parents=[common, fluid, flow], allow_abbrev=False,
                             help="Velocity, shear-rate and U_YY profile.")
    profile.add_argument("--partial", action="store_const", const=True, default=None,
                         help="Emit the axis-anchored profile on [0, Y1] when no classical solution exists.")

    sweep = sub.add_parser("sweep", parents=[common, fluid, flow], allow_abbrev=False,
                           help="Regime map over a parameter grid.")
    for name in SWEEP_PARAMS:
        sweep.add_argument(f"--sweep-{name}", default=None, metavar="MIN:MAX:STEPS")
    sweep.add_argument("--workers", type=int, default=None, help="Worker threads (default 1).")

    bounds = sub.add_parser("bounds", parents=[common, fluid], allow_abbrev=False,
                            help="K1 recursion, forward-backward flag, global-existence checks.")
    bounds.add_argument("--m", type=float, default=None, help="M value for the K1 recursion.")
    bounds.add_argument("--sup-f", type=float, default=None)
    bounds.add_argument("--sup-psi-prime", type=float, default=None)
    bounds.add_argument("--sup-psi-weighted", type=float, default=None)
    bounds.add_argument("--psi-file", default=None, help="CSV of Y, Psi samples.")
    bounds.add_argument("--beta", type=float, default=None, help="Forcing decay rate (recorded only).")

    sub.add_parser("selftest", parents=[common], allow_abbrev=False, help="Run the built-in golden checks.")
    return parser


# Values such as -1e-3 or -5:-1:3 that argparse would take for an option.
NEGATIVE_VALUE = re.compile(r"-(\d|\.\d|inf)", re.IGNORECASE)


def attach_negative_values(argv):
    """Rewrite "--opt -value" pairs as "--opt=-value" so argparse accepts them."""
    out = []
    i = 0
    while i < len(argv):
        token = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (token.startswith("--") and token != "--" and "=" not in token
                and nxt is not None and NEGATIVE_VALUE.match(nxt)):
            out.append(f"{token}={nxt}")
            i += 2
            continue
        if token == "--":
            out.extend(argv[i:])
            break
        out.append(token)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(attach_negative_values(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    flags = {k: v for k, v in vars(args).items() if k not in ('command', 'config', 'verbose')}
    try:
        config = ConfigManager(args.config).merge(args.command, flags)
        return COMMANDS[args.command](config)
    except PoiseuilleError as e:
        print(f"error: {e.reason}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as e:
        errors = ConfigManager.format_validation_errors(e)
        print("error: " + "; ".join(f"{k}: {v}" for k, v in errors.items()), file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
