"""Command-line front end: ``pk-levy <subcommand> ...``.

Exit status: 0 success, 1 numerical failure or failed validation,
2 configuration error, 3 model error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io
from .checks import SuiteConfig, format_table, run_suite
from .converse import build
from .decomposition import decompose, sample_stationary
from .errors import ConfigError, DomainError, ModelError, NotDecomposable, NumericalError
from .exponent import default_inversion_config, exponent_view, pk_lst, stationary_cdf, truncate
from .model import ValidatedModel, rate_to_float
from .numerics import InversionConfig
from .reflection import SCHEMES, PathConfig, simulate_reflected_terminal

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG, EXIT_MODEL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(f"{self.prog}: {message}")


def parse_grid(text: str) -> np.ndarray:
    """``"0.1,1,10"``, ``"lin:START:STOP:NUM"`` or ``"log:START_EXP:STOP_EXP:NUM"`` (base 10)."""
    try:
        if text.startswith(("lin:", "log:")):
            kind, start, stop, num = text.split(":")
            maker = np.linspace if kind == "lin" else np.logspace
            grid = maker(float(start), float(stop), int(num))
        else:
            grid = np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}") from None
    if grid.size == 0 or not np.all(np.isfinite(grid)):
        raise ConfigError(f"grid {text!r} is empty or not finite")
    return grid


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pk-levy", description="Pollaczek-Khinchine tools for spectrally positive Levy models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("model", help="model JSON file")
        p.add_argument("--epsilon", type=_positive_float, help="truncate jumps of size <= epsilon")
        return p

    def out(p, required):
        p.add_argument("-o", "--output", required=required, help="output CSV" + ("" if required else " (default stdout)"))

    model_cmd("inspect", "print nu_bar, mu, rho, lambda and capability flags")

    p = model_cmd("lst", "PK transform on an alpha grid")
    p.add_argument("--alpha", required=True, help="grid: a,b,c | lin:start:stop:num | log:e0:e1:num")
    out(p, False)

    p = model_cmd("sample", "exact stationary samples")
    p.add_argument("-n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, required=True)
    out(p, True)

    p = model_cmd("invert", "stationary CDF by transform inversion")
    p.add_argument("--x", required=True, help="grid of positive abscissas")
    p.add_argument("--series-terms", type=_positive_int)
    p.add_argument("--euler-terms", type=_positive_int)
    p.add_argument("--target", type=_positive_float)
    out(p, False)

    p = model_cmd("simulate", "terminal values of reflected paths")
    p.add_argument("--T", dest="horizon", type=_positive_float, required=True)
    p.add_argument("--h", dest="step", type=_positive_float, required=True)
    p.add_argument("--paths", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--scheme", choices=SCHEMES, default="bridge")
    out(p, True)

    p = sub.add_parser("converse", help="model file from an excess spec")
    p.add_argument("spec", help="excess spec JSON file")
    p.add_argument("-o", "--output", required=True, help="output model JSON")

    p = model_cmd("validate", "run the invariant suite")
    p.add_argument("-n", type=_positive_int, default=SuiteConfig.n)
    p.add_argument("--seed", type=int, default=SuiteConfig.seed)
    p.add_argument("--paths", type=_positive_int, default=SuiteConfig.paths)
    p.add_argument("--T", dest="horizon", type=_positive_float, help="path horizon (default 100/mu)")
    p.add_argument("--h", dest="step", type=_positive_float, default=SuiteConfig.step)
    p.add_argument("--no-paths", action="store_true", help="skip the path-simulation cross-check")
    return parser


def _fmt_rate(value) -> str:
    return io.fmt(rate_to_float(value))


def _view(model: ValidatedModel, epsilon):
    view = exponent_view(model)
    return truncate(exponent_view(model, "mu_form"), epsilon) if epsilon is not None else view


def cmd_inspect(args) -> int:
    model = io.read_model(args.model)
    view = _view(model, args.epsilon)
    m = view.model
    rows = [
        ("nu_bar", io.fmt(m.nu_bar)),
        ("mu", io.fmt(m.mu)),
        ("drift_c", io.fmt(m.drift_c) if m.drift_c is not None else "undefined"),
        ("rho", io.fmt(m.rho) if m.rho is not None else "undefined"),
        ("lambda", _fmt_rate(m.lam) if m.lam is not None else "undefined"),
        ("b", io.fmt(m.general_drift_b)),
        ("decomposable", str(m.decomposable).lower()),
        ("truncation_required", str(m.truncation_required).lower()),
        ("finite_activity", str(m.jumps.finite_activity).lower()),
    ]
    if args.epsilon is not None:
        rows.append(("epsilon", io.fmt(args.epsilon)))
    print("\n".join(f"{k}={v}" for k, v in rows))
    return EXIT_OK


def cmd_lst(args) -> int:
    view = _view(io.read_model(args.model), args.epsilon)
    alpha = parse_grid(args.alpha)
    io.write_csv(args.output, ("alpha", "pk_lst"), (alpha, pk_lst(view, alpha)))
    return EXIT_OK


def cmd_sample(args) -> int:
    model = io.read_model(args.model)
    if args.epsilon is None and not model.decomposable:
        raise NotDecomposable(
            f"{model.jumps.family} jumps have infinite mean; rerun with --epsilon to sample a truncation"
        )
    view = _view(model, args.epsilon)
    batch = sample_stationary(decompose(view), args.seed, args.n)
    if args.epsilon is not None:
        batch.meta["epsilon"] = args.epsilon
    io.write_batch(args.output, batch)
    return EXIT_OK


def cmd_invert(args) -> int:
    view = _view(io.read_model(args.model), args.epsilon)
    x = parse_grid(args.x)
    default = default_inversion_config(view)
    cfg = InversionConfig(
        series_terms=args.series_terms or default.series_terms,
        euler_terms=args.euler_terms or default.euler_terms,
        target=args.target or default.target,
    )
    io.write_csv(args.output, ("x", "cdf"), (x, stationary_cdf(view, x, cfg)))
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = io.read_model(args.model)
    view = _view(model, args.epsilon)
    batch = simulate_reflected_terminal(view.model, PathConfig(args.horizon, args.step, args.paths, args.seed), args.scheme)
    if args.epsilon is not None:
        batch.meta["epsilon"] = args.epsilon
    io.write_batch(args.output, batch)
    return EXIT_OK


def cmd_converse(args) -> int:
    io.write_model(args.output, build(io.read_spec(args.spec)))
    return EXIT_OK


def cmd_validate(args) -> int:
    model = io.read_model(args.model)
    cfg = SuiteConfig(
        n=args.n,
        seed=args.seed,
        paths=args.paths,
        horizon=args.horizon,
        step=args.step,
        epsilon=args.epsilon,
        paths_check=not args.no_paths,
    )
    results = run_suite(model, cfg)
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


COMMANDS = {
    "inspect": cmd_inspect,
    "lst": cmd_lst,
    "sample": cmd_sample,
    "invert": cmd_invert,
    "simulate": cmd_simulate,
    "converse": cmd_converse,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ModelError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
