"""Command-line front end.

Subcommands::

    shoot         solve one periodic profile, print the summary record
    profile       solve (or take --a0) and emit the half-trajectory CSV
    table         sweep a family over n, emit one CSV row per n
    discriminant  emit the sampled discriminant curve of one mode as CSV
    spectrum      assemble a full spectrum report for one operator
    check         run the invariant suite, one pass/fail line per check

Flag precedence is flags > config file > defaults; the effective
configuration is echoed into every report header.  Exit codes: 0 success,
1 check failure, 2 convergence/domain failure, 64 usage, 74 I/O.
"""

import argparse
import os
import sys

from .checks import run_profile_checks
from .errors import (
    ConfigError,
    DomainGuardError,
    EventNotFoundError,
    IntegrationError,
    RotspecError,
    ShootingError,
)
from .geometry import RotationParams
from .ivp import IntegratorConfig
from .profile import (
    PeriodicProfile,
    ShootingProblem,
    profile_from_a0,
    sample_profile,
    solve_periodic,
    table_sweep,
)
from .report import fmt, render_csv, render_report, write_atomic
from .spectrum import (
    DEFAULT_STEP,
    OperatorKind,
    assemble_spectrum,
    discriminant_curve,
    lambda_grid,
    mode_index,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONVERGENCE = 2
EXIT_USAGE = 64
EXIT_IO = 74

# Default scan windows per operator: the Laplace window covers the low
# spectrum, the stability window covers every negative eigenvalue with a
# factor-two margin.  Grids are half-open [min, max).
LAPLACE_RANGE = (0.0, 12.0)
JACOBI_RANGE = (-60.0, 1.0)

_FLOAT_KEYS = {"a0", "lambda_min", "lambda_max", "step", "rel_tol", "abs_tol"}
_INT_KEYS = {"n", "k", "l", "n_from", "n_to", "jobs"}
_STR_KEYS = {"operator", "mode", "out", "format"}


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems via ConfigError."""

    def error(self, message):
        raise ConfigError(message)


def _add_common(parser: _Parser) -> None:
    parser.add_argument("--n", type=int)
    parser.add_argument("--k", type=int)
    parser.add_argument("--l", type=int)
    parser.add_argument("--a0", type=float)
    parser.add_argument("--rel-tol", type=float, dest="rel_tol")
    parser.add_argument("--abs-tol", type=float, dest="abs_tol")
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--config", type=str)
    parser.add_argument("--out", type=str)
    parser.add_argument("--format", type=str, choices=["csv", "report"])


def _add_lambda(parser: _Parser) -> None:
    parser.add_argument("--lambda-min", type=float, dest="lambda_min")
    parser.add_argument("--lambda-max", type=float, dest="lambda_max")
    parser.add_argument("--step", type=float)
    parser.add_argument("--operator", type=str, choices=["laplace", "jacobi"])


def build_parser() -> _Parser:
    parser = _Parser(prog="rotspec", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("shoot", "profile", "check"):
        p = sub.add_parser(name)
        _add_common(p)
    p = sub.add_parser("table")
    _add_common(p)
    p.add_argument("--n-from", type=int, dest="n_from")
    p.add_argument("--n-to", type=int, dest="n_to")
    p = sub.add_parser("discriminant")
    _add_common(p)
    _add_lambda(p)
    p.add_argument("--mode", type=str, help="harmonic levels as i,j")
    p = sub.add_parser("spectrum")
    _add_common(p)
    _add_lambda(p)
    return parser


def load_config_file(path: str) -> dict:
    """Flat ``key = value`` file; keys match the long flag names."""
    values = {}
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        dest = key.strip().replace("-", "_")
        value = value.strip()
        if dest in _FLOAT_KEYS:
            values[dest] = float(value)
        elif dest in _INT_KEYS:
            values[dest] = int(value)
        elif dest in _STR_KEYS:
            values[dest] = value
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key.strip()!r}")
    return values


def _merge(args: argparse.Namespace) -> dict:
    merged = dict(vars(args))
    if merged.get("config"):
        file_values = load_config_file(merged["config"])
        for key, value in file_values.items():
            if key in merged and merged[key] is None:
                merged[key] = value
    return merged


def resolve_params(cfg: dict) -> RotationParams:
    n, k, l = cfg.get("n"), cfg.get("k"), cfg.get("l")
    known = sum(v is not None for v in (n, k, l))
    if known < 2:
        raise ConfigError("give at least two of --n, --k, --l")
    if n is None:
        n = k + l + 1
    elif k is None:
        k = n - l - 1
    elif l is None:
        l = n - k - 1
    if n != k + l + 1:
        raise ConfigError(f"inconsistent dimensions: n={n}, k={k}, l={l} "
                          f"(need n = k + l + 1)")
    try:
        return RotationParams(k=k, l=l, n=n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def integrator_config(cfg: dict) -> IntegratorConfig:
    kwargs = {}
    if cfg.get("rel_tol") is not None:
        kwargs["rel_tol"] = cfg["rel_tol"]
    if cfg.get("abs_tol") is not None:
        kwargs["abs_tol"] = cfg["abs_tol"]
    try:
        return IntegratorConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _jobs(cfg: dict) -> int:
    jobs = cfg.get("jobs")
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs < 1:
        raise ConfigError(f"--jobs must be >= 1, got {jobs}")
    return jobs


def _operator(cfg: dict, required: bool) -> OperatorKind:
    name = cfg.get("operator")
    if name is None:
        if required:
            raise ConfigError("spectrum requires --operator")
        name = "laplace"
    try:
        return OperatorKind(name)
    except ValueError as exc:
        raise ConfigError(f"unknown operator {name!r}") from exc


def _lambda_range(cfg: dict, kind: OperatorKind) -> tuple[float, float, float]:
    default = LAPLACE_RANGE if kind is OperatorKind.LAPLACE else JACOBI_RANGE
    lo = cfg["lambda_min"] if cfg.get("lambda_min") is not None else default[0]
    hi = cfg["lambda_max"] if cfg.get("lambda_max") is not None else default[1]
    step = cfg["step"] if cfg.get("step") is not None else DEFAULT_STEP
    if not hi > lo:
        raise ConfigError(f"need lambda_max > lambda_min, got [{lo}, {hi})")
    if step <= 0:
        raise ConfigError("--step must be positive")
    return lo, hi, step


def _config_echo(cfg: dict, params: RotationParams | None = None) -> dict:
    echo = {}
    if params is not None:
        echo.update(n=params.n, k=params.k, l=params.l)
    for key in ("a0", "operator", "lambda_min", "lambda_max", "step",
                "rel_tol", "abs_tol", "jobs", "n_from", "n_to", "mode",
                "format"):
        if cfg.get(key) is not None:
            echo[key] = cfg[key]
    return echo


def _emit(cfg: dict, text: str) -> None:
    out = cfg.get("out")
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _get_profile(cfg: dict, params: RotationParams,
                 config: IntegratorConfig) -> PeriodicProfile:
    if cfg.get("a0") is not None:
        return profile_from_a0(params, cfg["a0"], config)
    return solve_periodic(ShootingProblem(params=params, integrator=config))


def _profile_summary(profile: PeriodicProfile) -> dict:
    return {
        "n": profile.params.n,
        "k": profile.params.k,
        "l": profile.params.l,
        "a0": profile.a0,
        "T": profile.T,
        "residual_f1": profile.residual_f1,
        "residual_theta": profile.residual_theta,
        "residual_f2": profile.residual_f2,
        "f2_closure_flagged": profile.f2_closure_flagged,
        "minimality_residual": profile.minimality_residual,
    }


def _check_format(cfg: dict, expected: str) -> None:
    chosen = cfg.get("format")
    if chosen is not None and chosen != expected:
        raise ConfigError(
            f"command {cfg['command']} emits {expected} output only")


def cmd_shoot(cfg: dict) -> int:
    _check_format(cfg, "report")
    params = resolve_params(cfg)
    config = integrator_config(cfg)
    profile = _get_profile(cfg, params, config)
    body = {"config": _config_echo(cfg, params),
            "result": _profile_summary(profile)}
    _emit(cfg, render_report("rotspec shoot", body))
    return EXIT_OK


def cmd_profile(cfg: dict) -> int:
    _check_format(cfg, "csv")
    params = resolve_params(cfg)
    config = integrator_config(cfg)
    profile = _get_profile(cfg, params, config)
    rows = sample_profile(profile)
    _emit(cfg, render_csv(["u", "f1", "f2", "theta", "nH_residual"], rows))
    return EXIT_OK


def cmd_table(cfg: dict) -> int:
    _check_format(cfg, "csv")
    l = cfg.get("l")
    if l is None:
        raise ConfigError("table requires --l")
    n_from, n_to = cfg.get("n_from"), cfg.get("n_to")
    if n_from is None or n_to is None:
        raise ConfigError("table requires --n-from and --n-to")
    config = integrator_config(cfg)
    result = table_sweep(l, (n_from, n_to), config, jobs=_jobs(cfg))
    for n, reason in result.failures:
        sys.stderr.write(f"rotspec table: n={n} skipped: {reason}\n")
    if not result.profiles:
        raise ShootingError("every n in the requested range failed")
    rows = [(p.params.n, p.params.k, p.params.l, p.a0, p.T,
             p.residual_f1, p.residual_theta, p.residual_f2,
             p.minimality_residual) for p in result.profiles]
    _emit(cfg, render_csv(
        ["n", "k", "l", "a0", "T", "residual_f1", "residual_theta",
         "residual_f2", "minimality_residual"], rows))
    return EXIT_OK


def _parse_mode(cfg: dict) -> tuple[int, int]:
    raw = cfg.get("mode")
    if raw is None:
        raise ConfigError("discriminant requires --mode i,j")
    try:
        i_str, j_str = raw.split(",")
        i, j = int(i_str), int(j_str)
    except ValueError as exc:
        raise ConfigError(f"--mode expects 'i,j', got {raw!r}") from exc
    if i < 0 or j < 0:
        raise ConfigError("mode levels must be nonnegative")
    return i, j


def cmd_discriminant(cfg: dict) -> int:
    _check_format(cfg, "csv")
    params = resolve_params(cfg)
    config = integrator_config(cfg)
    kind = _operator(cfg, required=False)
    i, j = _parse_mode(cfg)
    lo, hi, step = _lambda_range(cfg, kind)
    profile = _get_profile(cfg, params, config)
    curve = discriminant_curve(profile, mode_index(i, j, params), kind,
                               lambda_grid(lo, hi, step), config)
    rows = list(zip(curve.lams, curve.delta0, curve.z1T, curve.z2T,
                    curve.dz1T, curve.dz2T))
    _emit(cfg, render_csv(
        ["lambda", "delta0", "z1T", "z2T", "dz1T", "dz2T"], rows))
    return EXIT_OK


def cmd_spectrum(cfg: dict) -> int:
    _check_format(cfg, "report")
    params = resolve_params(cfg)
    config = integrator_config(cfg)
    kind = _operator(cfg, required=True)
    lo, hi, step = _lambda_range(cfg, kind)
    profile = _get_profile(cfg, params, config)
    rep = assemble_spectrum(profile, kind, (lo, hi), step, config,
                            jobs=_jobs(cfg))
    groups = []
    for grp in rep.groups:
        groups.append({
            "value": grp.value,
            "multiplicity": grp.multiplicity,
            "members": [
                {"mode": f"({r.mode.i},{r.mode.j})",
                 "value": r.value,
                 "kernel_dim": r.kernel_dim,
                 "total_multiplicity": r.total_multiplicity}
                for r in grp.members],
        })
    result = {
        "operator": kind.value,
        "a0": rep.a0,
        "T": rep.T,
        "lambda_min": rep.lambda_min,
        "lambda_max": rep.lambda_max,
        "step": rep.step,
        "groups": groups,
        "scanned_modes": [f"({m.i},{m.j})" for m in rep.scanned_modes],
        "frontier_modes": [f"({m.i},{m.j})" for m in rep.frontier_modes],
        "skipped_modes": [f"({i},{j})<=({a},{b})"
                          for (i, j), (a, b) in rep.skipped_modes],
    }
    if kind is OperatorKind.JACOBI:
        result["stability_index"] = rep.stability_index
        result["nullity"] = rep.nullity
    body = {"config": _config_echo(cfg, params), "result": result}
    _emit(cfg, render_report("rotspec spectrum", body))
    return EXIT_OK


def cmd_check(cfg: dict) -> int:
    _check_format(cfg, "report")
    params = resolve_params(cfg)
    config = integrator_config(cfg)
    profile = _get_profile(cfg, params, config)
    results = run_profile_checks(profile, config)
    lines = []
    for res in results:
        verdict = "PASS" if res.passed else "FAIL"
        lines.append(f"{res.name}: measured={fmt(res.measured)} "
                     f"threshold={fmt(res.threshold)} {verdict}")
    text = "\n".join(lines) + "\n"
    _emit(cfg, text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


_COMMANDS = {
    "shoot": cmd_shoot,
    "profile": cmd_profile,
    "table": cmd_table,
    "discriminant": cmd_discriminant,
    "spectrum": cmd_spectrum,
    "check": cmd_check,
}


def _error_block(kind: str, code: int, message: str) -> None:
    sys.stderr.write(f"error:\n  kind: {kind}\n  exit_code: {code}\n"
                     f"  message: {message}\n")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = _merge(args)
        return _COMMANDS[cfg["command"]](cfg)
    except (ConfigError, ValueError) as exc:
        _error_block("usage", EXIT_USAGE, str(exc))
        return EXIT_USAGE
    except (ShootingError, DomainGuardError, EventNotFoundError,
            IntegrationError) as exc:
        _error_block("convergence", EXIT_CONVERGENCE, str(exc))
        return EXIT_CONVERGENCE
    except RotspecError as exc:
        _error_block("convergence", EXIT_CONVERGENCE, str(exc))
        return EXIT_CONVERGENCE
    except OSError as exc:
        _error_block("io", EXIT_IO, str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
