"""Command-line entry point: run single experiments and convergence studies.

Exit codes: 0 on success, 1 on solver blow-up, 2 on bad configuration.
"""

import argparse
import logging
import sys

from .cases import RunConfig, convergence_study, registry, run
from .estimator import QuadratureConfig
from .reporting import emit, write_profile
from .timestepping import SolverBlowUpError

EXIT_OK = 0
EXIT_BLOWUP = 1
EXIT_BAD_CONFIG = 2

_BOOL = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}

# config-file / CLI keys -> (RunConfig field, parser)
_KEYS = {
    "case": ("case", str),
    "M": ("M", int),
    "dt": ("dt", float),
    "N": ("N", int),
    "p": ("p", int),
    "numflux": ("numflux_kind", str),
    "projection": ("projection", str),
    "limiter": ("limiter_on", lambda s: _BOOL[s.lower()]),
    "tvb": ("tvb", float),
    "reconstruction_start": ("reconstruction_start", float),
    "scheme": ("scheme", str),
    "T": ("T", float),
    "levels": ("levels", int),
    "mode": ("mode", str),
    "out": ("out_path", str),
}

_QUAD_KEYS = {
    "quad_time": "n_time_per_interval",
    "quad_space": "n_space_per_element",
    "quad_stochastic": "n_stochastic",
}


def load_config_file(path: str) -> dict:
    """Parse a plain key=value file; '#' starts a comment, blank lines skipped."""
    out = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in _KEYS and key not in _QUAD_KEYS:
                known = ", ".join(sorted(list(_KEYS) + list(_QUAD_KEYS)))
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}; "
                                 f"known keys: {known}")
            out[key] = val
    return out


def build_run_config(args, file_values: dict) -> RunConfig:
    """Merge config-file values and CLI overrides (CLI wins) into a RunConfig."""
    values = dict(file_values)
    for key in _KEYS:
        cli_val = getattr(args, key.replace("-", "_"), None)
        if cli_val is not None:
            values[key] = cli_val
    if "case" not in values:
        raise ValueError("no test case given (use --case or a config file)")

    quad_kwargs = {}
    for key, field in _QUAD_KEYS.items():
        if key in values:
            quad_kwargs[field] = int(values.pop(key))
    kwargs = {"quad": QuadratureConfig(**quad_kwargs)} if quad_kwargs else {}
    for key, val in values.items():
        field, parse = _KEYS[key]
        kwargs[field] = parse(val) if isinstance(val, str) else val
    return RunConfig(**kwargs)


def _add_common(sub):
    sub.add_argument("--config", help="key=value config file")
    sub.add_argument("--case", help="test case name (see list-cases)")
    sub.add_argument("--M", type=int, help="number of elements")
    sub.add_argument("--dt", type=float, help="time step size")
    sub.add_argument("--N", type=int, help="chaos polynomial degree")
    sub.add_argument("--p", type=int, help="DG polynomial degree")
    sub.add_argument("--numflux", choices=["upwind", "lax_wendroff"])
    sub.add_argument("--projection", choices=["radau_plus", "gl_interp"])
    sub.add_argument("--limiter", type=lambda s: _BOOL[s.lower()],
                     help="slope limiter on/off (true/false)")
    sub.add_argument("--tvb", type=float, help="TVB limiter constant")
    sub.add_argument("--reconstruction-start", dest="reconstruction_start",
                     type=float, help="time to start the reconstruction from")
    sub.add_argument("--scheme", choices=["ssprk3", "rk3_7"])
    sub.add_argument("--T", type=float, help="final time")
    sub.add_argument("--out", dest="out", help="output CSV path")
    sub.add_argument("--format", choices=["csv", "json"], default="csv")
    sub.add_argument("--profile-out", help="per-element residual profile CSV path")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgrkdg",
        description="Stochastic Galerkin RK-DG solver with a posteriori "
                    "residual error estimation for 1D conservation laws")
    subs = parser.add_subparsers(dest="command", required=True)

    p_run = subs.add_parser("run", help="run a single experiment")
    _add_common(p_run)

    p_conv = subs.add_parser("convergence", help="run a refinement study")
    _add_common(p_conv)
    p_conv.add_argument("--levels", type=int, help="number of refinement levels")
    p_conv.add_argument("--mode", choices=["h_refine", "N_refine"],
                        help="refinement direction")

    subs.add_parser("list-cases", help="list registered test cases")
    return parser


def _print_table(rows):
    print(",".join(f for f in ("level", "M", "N", "p", "error", "R_st",
                               "R_stoch", "eoc_error", "eoc_R_st")))
    for r in rows:
        print(f"{r.level},{r.M},{r.N},{r.p},{r.error:.6e},{r.R_st:.6e},"
              f"{r.R_stoch:.6e},{r.eoc_error:.3f},{r.eoc_R_st:.3f}")


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING)
    parser = make_parser()
    args = parser.parse_args(argv)

    if args.command == "list-cases":
        for case in registry():
            exact = "exact solution" if case.exact is not None else "no exact solution"
            print(f"{case.name}: {case.flux.kind} on {list(case.domain)}, "
                  f"T={case.T}, defaults M={case.n_elements}, dt={case.dt}, "
                  f"N={case.chaos_degree}, p={case.dg_degree}, "
                  f"{case.numflux_kind}, {exact}")
        return EXIT_OK

    try:
        file_values = load_config_file(args.config) if args.config else {}
        config = build_run_config(args, file_values)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG

    try:
        if args.command == "run":
            result = run(config)
            rows = [result.row]
            if args.profile_out:
                write_profile(result, args.profile_out)
        else:
            if config.levels < 1:
                raise ValueError("levels must be >= 1")
            flushed = []

            def flush(row):
                flushed.append(row)
                if config.out_path:
                    emit(flushed, args.format, config.out_path)

            try:
                rows = convergence_study(config, on_row=flush)
            except SolverBlowUpError:
                raise  # partial table already flushed by on_row
    except SolverBlowUpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG

    if config.out_path:
        emit(rows, args.format, config.out_path)
        print(f"wrote {config.out_path}")
    else:
        _print_table(rows)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
