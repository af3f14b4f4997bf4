"""Command-line front end.

Subcommands: ``equilibrium``, ``simulate``, ``classify``, ``sweep``,
``stochastic``.  Data goes to stdout (or ``--output PATH``, written
atomically via a temp file) in CSV or JSON; diagnostics go to stderr so
pipelines stay clean.  Exit codes: 0 success, 2 invalid input, 3 no
equilibrium, 4 degenerate clamp, 5 boundary classification.

A ``--config FILE`` of ``key=value`` lines (keys are the long flag names
without the leading dashes) supplies defaults for any flag of the chosen
subcommand; flags given on the command line win on conflict.
"""

import argparse
import os
import sys
import tempfile

from . import serialize
from .classify import (
    BoundaryCaseError,
    Scenario,
    UnresolvedPredictionError,
    classify,
    grid_cells,
    sweep,
)
from .core import (
    DegenerateClampError,
    DirectingParams,
    InvalidInputError,
    NoEquilibriumError,
    RawState,
    SimplexPoint,
    compute_equilibrium,
    trajectory,
)
from .sampling import SampleConfig, lln_diagnostic, run_replications

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NO_EQUILIBRIUM = 3
EXIT_DEGENERATE_CLAMP = 4
EXIT_BOUNDARY = 5

MAX_GRID_CELLS = 1_000_000

_BOOLEAN_KEYS = {"simulate", "allow-out-of-range"}


def _triple(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected three numbers, got {text!r}") from None


def _volumes(text):
    try:
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _axis(text):
    """Axis values for a sweep: a single number or an inclusive start:stop:step range."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) != 3:
            raise ValueError
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected NUMBER or START:STOP:STEP, got {text!r}"
        ) from None
    if step == 0.0:
        raise argparse.ArgumentTypeError("range step must be nonzero")
    span = (stop - start) / step
    if span < 0.0:
        raise argparse.ArgumentTypeError(f"range {text!r} is empty: step points away from stop")
    count = int(span + 1e-9) + 1
    if count > MAX_GRID_CELLS:
        raise argparse.ArgumentTypeError(f"range {text!r} enumerates too many values")
    return [round(start + i * step, 12) for i in range(count)]


def _cells(text):
    cells = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if chunk:
            cells.append(_triple(chunk))
    return cells


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ternary-dynamics",
        description="Simulate, analyze and classify ternary statistical experiment dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output format (default csv)")
        sp.add_argument("--output", default="-", metavar="PATH",
                        help="output file; '-' for stdout (default)")
        sp.add_argument("--config", metavar="FILE",
                        help="key=value defaults file; explicit flags win")

    def params_flags(sp):
        sp.add_argument("--v", type=_triple, required=True, metavar="V0,V1,V2",
                        help="directing action parameters")
        sp.add_argument("--allow-out-of-range", action="store_true",
                        help="permit |v_m| > 1 (runs are flagged in the output)")

    sp = sub.add_parser("equilibrium", help="closed-form equilibrium for a parameter triple")
    params_flags(sp)
    common(sp)

    sp = sub.add_parser("simulate", help="iterate the dynamics and emit the trajectory")
    params_flags(sp)
    sp.add_argument("--init", type=_triple, required=True, metavar="P0,P1,P2")
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--mode", choices=("raw", "clamped"), default="raw",
                    help="raw keeps the literal linear dynamics; clamped stays on the simplex")
    common(sp)

    sp = sub.add_parser("classify", help="limit scenario of one coordinate")
    params_flags(sp)
    sp.add_argument("--m", type=int, default=0, help="coordinate index (default 0)")
    sp.add_argument("--init", type=_triple, metavar="P0,P1,P2",
                    help="initial point, used to resolve the repulsive prediction")
    sp.add_argument("--p0", type=float,
                    help="initial value of coordinate 0 (shortcut for --init with --m 0)")
    common(sp)

    sp = sub.add_parser("sweep", help="scenario table over a parameter grid")
    sp.add_argument("--cells", type=_cells, metavar="V0,V1,V2;V0,V1,V2;...",
                    help="explicit semicolon-separated list of parameter triples")
    sp.add_argument("--v0", type=_axis, metavar="SPEC", help="axis value or START:STOP:STEP")
    sp.add_argument("--v1", type=_axis, metavar="SPEC")
    sp.add_argument("--v2", type=_axis, metavar="SPEC")
    sp.add_argument("--m", type=int, default=0)
    sp.add_argument("--init", type=_triple, required=True, metavar="P0,P1,P2")
    sp.add_argument("--simulate", action="store_true",
                    help="also estimate the clamped limit and check agreement")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-steps", type=int, default=10000)
    sp.add_argument("--agreement-tol", type=float, default=1e-6)
    sp.add_argument("--allow-out-of-range", action="store_true")
    common(sp)

    sp = sub.add_parser("stochastic", help="finite-sample replications and deviation table")
    params_flags(sp)
    sp.add_argument("--init", type=_triple, required=True, metavar="P0,P1,P2")
    sp.add_argument("--n", type=_volumes, required=True, metavar="N[,N...]",
                    help="sample volume(s); several values emit the deviation table")
    sp.add_argument("--reps", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--steps", type=int, required=True)
    common(sp)

    return parser


def _config_flags(path):
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InvalidInputError(f"cannot read config file {path!r}: {exc}") from exc
    flags = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidInputError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise InvalidInputError(f"{path}:{lineno}: empty key")
        if key in _BOOLEAN_KEYS:
            if value.lower() == "true":
                flags.append(f"--{key}")
            elif value.lower() != "false":
                raise InvalidInputError(f"{path}:{lineno}: {key} must be true or false")
        else:
            flags.extend([f"--{key}", value])
    return flags


def _merge_negative_values(argv):
    """Join ``--flag -0.2,...`` into ``--flag=-0.2,...``.

    argparse would otherwise read a value with a leading minus as an option
    string; merging keeps negative numbers usable as plain flag values.
    """
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if (
            arg.startswith("--")
            and "=" not in arg
            and i + 1 < len(argv)
            and len(argv[i + 1]) > 1
            and argv[i + 1][0] == "-"
            and argv[i + 1][1] in "0123456789."
        ):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
            continue
        out.append(arg)
        i += 1
    return out


def _apply_config(argv):
    """Strip --config from argv and splice its flags in after the subcommand."""
    out = []
    path = None
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg == "--config":
            if i + 1 >= len(argv):
                raise InvalidInputError("--config requires a file path")
            path = argv[i + 1]
            i += 2
            continue
        if arg.startswith("--config="):
            path = arg.split("=", 1)[1]
            i += 1
            continue
        out.append(arg)
        i += 1
    if path is None or not out:
        return out
    return out[:1] + _config_flags(path) + out[1:]


def _params_from(args):
    return DirectingParams(*args.v, bound_check=not args.allow_out_of_range)


def _range_flags(params):
    return ("params_out_of_range",) if not params.in_model_range else ()


def _cmd_equilibrium(args):
    params = _params_from(args)
    eq = compute_equilibrium(params)
    flags = _range_flags(params)
    if args.format == "json":
        return serialize.equilibrium_to_json(eq, flags)
    return serialize.equilibrium_to_csv(eq, flags)


def _cmd_simulate(args):
    params = _params_from(args)
    if args.mode == "clamped":
        init = SimplexPoint(*args.init)
    else:
        init = RawState(*args.init)
    states = trajectory(params, init, args.steps, mode=args.mode)
    if args.mode == "raw":
        for k, state in enumerate(states):
            if any(p < 0.0 or p > 1.0 for p in state):
                print(
                    f"warning: raw trajectory leaves [0, 1] first at stage {k}; "
                    "components are not probabilities there",
                    file=sys.stderr,
                )
                break
    if args.format == "json":
        return serialize.trajectory_to_json(states)
    return serialize.trajectory_to_csv(states)


def _cmd_classify(args):
    params = _params_from(args)
    report = classify(params, args.m)
    if args.p0 is not None and args.init is not None:
        raise InvalidInputError("pass --p0 or --init, not both")
    initial_value = None
    if args.p0 is not None:
        if args.m != 0:
            raise InvalidInputError("--p0 sets coordinate 0; use --init for other coordinates")
        initial_value = args.p0
    elif args.init is not None:
        initial_value = SimplexPoint(*args.init)
        initial_value = tuple(initial_value)[args.m]
    if report.scenario is Scenario.REPULSIVE:
        if initial_value is None:
            predicted = "conditional"
        else:
            predicted = report.resolve_limit(initial_value)
    else:
        predicted = report.predicted_limit
    flags = _range_flags(params)
    if args.format == "json":
        return serialize.classification_to_json(report, predicted, flags)
    return serialize.classification_to_csv(report, predicted, flags)


def _cmd_sweep(args):
    axes = (args.v0, args.v1, args.v2)
    if args.cells is not None and any(a is not None for a in axes):
        raise InvalidInputError("pass either --cells or the --v0/--v1/--v2 axes, not both")
    if args.cells is not None:
        cells = args.cells
    else:
        if any(a is None for a in axes):
            raise InvalidInputError("axis sweep needs all of --v0, --v1 and --v2")
        if len(axes[0]) * len(axes[1]) * len(axes[2]) > MAX_GRID_CELLS:
            raise InvalidInputError("grid is too large")
        cells = grid_cells(*axes)
    rows = sweep(
        cells,
        coordinate=args.m,
        init=SimplexPoint(*args.init),
        simulate=args.simulate,
        bound_check=not args.allow_out_of_range,
        tol=args.tol,
        max_steps=args.max_steps,
        agreement_tol=args.agreement_tol,
    )
    if args.format == "json":
        return serialize.sweep_to_json(rows)
    return serialize.sweep_to_csv(rows)


def _cmd_stochastic(args):
    params = _params_from(args)
    init = SimplexPoint(*args.init)
    if not args.n:
        raise InvalidInputError("--n needs at least one sample volume")
    cfg = SampleConfig(
        sample_volume=args.n[0], replications=args.reps, seed=args.seed, steps=args.steps
    )
    if len(args.n) == 1:
        trajectories = run_replications(params, init, cfg)
        if args.format == "json":
            return serialize.replications_to_json(trajectories)
        return serialize.replications_to_csv(trajectories)
    rows = lln_diagnostic(params, init, args.n, cfg)
    if args.format == "json":
        return serialize.deviation_table_to_json(rows)
    return serialize.deviation_table_to_csv(rows)


_COMMANDS = {
    "equilibrium": _cmd_equilibrium,
    "simulate": _cmd_simulate,
    "classify": _cmd_classify,
    "sweep": _cmd_sweep,
    "stochastic": _cmd_stochastic,
}


def _write_output(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".ternary-dynamics-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def _fail(exc, code):
    print(f"error: {exc}", file=sys.stderr)
    return code


def main(argv=None):
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        argv = _merge_negative_values(_apply_config(argv))
    except InvalidInputError as exc:
        return _fail(exc, EXIT_INVALID_INPUT)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID_INPUT if exc.code is None else int(exc.code)
    try:
        text = _COMMANDS[args.command](args)
    except InvalidInputError as exc:
        return _fail(exc, EXIT_INVALID_INPUT)
    except NoEquilibriumError as exc:
        return _fail(exc, EXIT_NO_EQUILIBRIUM)
    except DegenerateClampError as exc:
        return _fail(exc, EXIT_DEGENERATE_CLAMP)
    except (BoundaryCaseError, UnresolvedPredictionError) as exc:
        return _fail(exc, EXIT_BOUNDARY)
    except ValueError as exc:
        return _fail(exc, EXIT_INVALID_INPUT)
    _write_output(text, args.output)
    return EXIT_OK


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
