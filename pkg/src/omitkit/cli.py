"""``omit`` command-line front end.

Precedence: built-in defaults < ``--config`` JSON file < command-line flags.
Exit codes: 0 success, 1 configuration error, 2 verification failure,
3 numerical failure (divergence, bracket or convergence trouble).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import __version__
from .errors import (BracketError, ConfigError, ConvergenceError, DivergenceError, DomainError,
                     OmitError, RangeError, SearchError, SingularityError)
from .figures import (FIGURES, MODES, GridSpec, RunConfig, run_conditions, run_figure,
                      run_gain, run_spectrum, run_sweep, run_width)

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3
NUMERICAL_ERRORS = (BracketError, ConvergenceError, DivergenceError, RangeError,
                    SearchError, SingularityError)

RUNNERS = {"spectrum": run_spectrum, "conditions": run_conditions, "width": run_width,
           "gain": run_gain, "sweep": run_sweep}


def _beta(text: str):
    if text in ("beta_o", "beta_g"):
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("expected a number, beta_o or beta_g") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # bad flags are configuration errors, not verification failures
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="omit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--config", help="JSON run configuration (a dataset JSON also works)")
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--format", choices=("csv", "json"))
    ap.add_argument("--figure", type=int, choices=FIGURES)
    ap.add_argument("--beta", type=_beta, help="number, beta_o or beta_g")
    ap.add_argument("--grid", help="min:max:count[:log]")
    ap.add_argument("--kappa", type=float)
    ap.add_argument("--gamma", type=float)
    ap.add_argument("--omega-m", dest="omega_m", type=float)
    ap.add_argument("--Q", type=float)
    ap.add_argument("--linearized", action="store_true", default=None,
                    help="also emit the linearized response (spectrum)")
    ap.add_argument("--sweep", choices=("kappa_ratio", "Q"))
    ap.add_argument("--suite", choices=("closed-forms", "oracle", "all"))
    ap.add_argument("--tolerance-scale", type=float, default=1.0,
                    help="multiply every verify tolerance (0 forces failures)")
    return ap


def load_config(args) -> RunConfig:
    base: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"config: {exc}") from None
        if not isinstance(base, dict):
            raise ConfigError("config: top level must be an object")
    cfg = RunConfig.from_dict(base) if base else RunConfig()

    over = {"mode": args.mode}
    for name in ("out", "format", "figure", "beta", "linearized", "sweep", "suite"):
        v = getattr(args, name)
        if v is not None:
            over[name] = v
    if args.grid is not None:
        over["grid"] = GridSpec.parse(args.grid)
    flags = {k: getattr(args, k) for k in ("kappa", "gamma", "omega_m", "Q")
             if getattr(args, k) is not None}
    if flags:
        if cfg.physical is not None:
            raise ConfigError("reduced-parameter flags conflict with physical parameters in the config")
        reduced = dict(cfg.reduced or {})
        # a flag for gamma replaces a file Q and vice versa
        if "gamma" in flags:
            reduced.pop("Q", None)
        if "Q" in flags:
            reduced.pop("gamma", None)
        reduced.update(flags)
        over["reduced"] = reduced
    return replace(cfg, **over)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig, tolerance_scale: float = 1.0) -> int:
    if cfg.mode == "verify":
        from .verify import run_verify
        report = run_verify(cfg.suite, tolerance_scale)
        if cfg.format == "json":
            _emit(report.to_json(), cfg.out)
        else:
            _emit("\n".join(report.lines()) + "\n", cfg.out)
        return EXIT_OK if report.passed else EXIT_VERIFY
    if cfg.mode == "figure":
        ds = run_figure(cfg.figure, grid=cfg.grid, config=cfg)
    else:
        ds = RUNNERS[cfg.mode](cfg)
    _emit(ds.dump(cfg.format), cfg.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return run(cfg, args.tolerance_scale)
    except NUMERICAL_ERRORS as exc:
        print(f"omit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, DomainError) as exc:
        print(f"omit: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OmitError as exc:  # pragma: no cover - every subclass is mapped above
        print(f"omit: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
