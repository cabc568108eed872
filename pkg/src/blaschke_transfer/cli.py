"""Command-line front end: ``spectrum``, ``verify`` and ``converge``.

Exit codes: 0 success, 1 usage error, 2 map not expanding, 3 no admissible
annulus, 4 numerical failure or failed checks. Errors are reported as a JSON
object with an ``"error"`` key.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .adjoint import (
    adjoint_block_matrix,
    adjoint_identity_residual,
    kernel_reconstruction_check,
    projected_spectrum_discrepancy,
    triangularity,
)
from .blaschke import (
    BlaschkeProduct,
    NotExpandingError,
    closed_form_spectrum,
    expansivity_check,
    fixed_points,
    parse_power_map,
)
from .hardy import Annulus, AnnulusError, DEFAULT_MARGIN, admissible_annulus, check_annulus
from .numerics import NumericsError, eig_dense
from .reports import complex_list, complex_pair, dumps_report, matrix_to_csv, parse_complex
from .spectral import (
    DEFAULT_K,
    clean_eigenvalues,
    convergence_study,
    match_spectrum,
    spectrum_discrepancy,
    trace_diagnostic,
)
from .transfer import default_M, transfer_matrix

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_EXPANDING = 2
EXIT_NO_ANNULUS = 3
EXIT_NUMERICS = 4

DEFAULT_N = 24
DEFAULT_N_LIST = (8, 12, 16, 20, 24)
DEFAULT_TRIALS = 100

# (threshold) per verify check
THRESHOLDS = {
    "spectrum_match": 1e-6,
    "adjoint_identity": 1e-8,
    "cross_validation": 1e-6,
    "projected_spectrum": 1e-8,
    "triangularity_upper": 1e-12,
    "triangularity_diagonal": 1e-10,
    "kernel_reconstruction": 1e-10,
    "trace": 1e-6,
    "fixed_point_conjugacy": 1e-9,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class RunConfig:
    command: str
    map_source: str
    blaschke: BlaschkeProduct
    N: int | None = None
    N_list: tuple = ()
    M: int | None = None
    annulus: Annulus | None = None
    margin: float = DEFAULT_MARGIN
    seed: int = 0
    k: int = DEFAULT_K
    trials: int = DEFAULT_TRIALS
    out: str | None = None
    dump: str | None = None
    extra: dict = field(default_factory=dict)

    def resolved(self, annulus=None, M=None):
        """All settings with defaults filled in, as stored in every report."""
        a = annulus or self.annulus
        return {
            "command": self.command,
            "map": self.map_source,
            "blaschke": self.blaschke.to_json(),
            "N": self.N,
            "N_list": list(self.N_list) or None,
            "M": M if M is not None else self.M,
            "annulus": None if a is None else a.to_json(),
            "annulus_source": "override" if self.annulus is not None else "search",
            "margin": self.margin,
            "seed": self.seed,
            "k": self.k,
            "trials": self.trials,
            "out": self.out,
            "dump": self.dump,
            "version": __version__,
        }


# parsing ------------------------------------------------------------------


def _blaschke_from_json(data):
    if not isinstance(data, dict) or "zeros" not in data:
        raise ValueError('map JSON needs a "zeros" list of [re, im] pairs')
    try:
        return BlaschkeProduct.from_json(data)
    except (TypeError, KeyError) as exc:
        raise ValueError(f"malformed map JSON: {exc}") from None


def resolve_map(args):
    given = [x for x in (args.map, args.mu, args.file) if x is not None]
    if len(given) != 1:
        raise UsageError("exactly one of --map, --mu, --file is required")
    if args.mu is not None:
        return f"mu={args.mu}", BlaschkeProduct.mu_family(parse_complex(args.mu))
    if args.file is not None:
        text = Path(args.file).read_text()
        return f"file={args.file}", _blaschke_from_json(json.loads(text))
    text = args.map.strip()
    if text.startswith("{"):
        return text, _blaschke_from_json(json.loads(text))
    return text, parse_power_map(text)


def _parse_annulus(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"--annulus expects 'r,R', got {text!r}")
    return Annulus(float(parts[0]), float(parts[1]))


def _parse_N_list(text):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"-N expects comma-separated integers, got {text!r}") from None


def build_parser():
    common = _Parser(add_help=False)
    src = common.add_argument_group("map")
    src.add_argument("--map", help="'z^n' shorthand or inline JSON {\"zeros\": [[re, im], ...], \"constant\": [re, im]}")
    src.add_argument("--mu", help="complex mu ('re+imi'): zeros {0, mu}, C = -1")
    src.add_argument("--file", help="path to a JSON file with the map")
    common.add_argument("-M", type=int, default=None, help="collocation points (default 4(2N+1))")
    common.add_argument("--annulus", default=None, help="override the annulus as 'r,R'")
    common.add_argument("--margin", type=float, default=DEFAULT_MARGIN, help="relative safety margin of the annulus search")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    parser = _Parser(prog="blaschke-transfer", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("spectrum", parents=[common], help="eigenvalues of both discretisations vs the closed form")
    sp.add_argument("-N", type=int, default=DEFAULT_N)
    sp.add_argument("--k", type=int, default=DEFAULT_K, help="number of predicted eigenvalues to match")
    sp.add_argument("--dump", default=None, help="directory for CSV matrix dumps")

    vp = sub.add_parser("verify", parents=[common], help="run all property checks against their thresholds")
    vp.add_argument("-N", type=int, default=DEFAULT_N)
    vp.add_argument("--k", type=int, default=DEFAULT_K)
    vp.add_argument("--trials", type=int, default=DEFAULT_TRIALS)

    cp = sub.add_parser("converge", parents=[common], help="match error against N, with an exponential fit")
    cp.add_argument("-N", default=",".join(map(str, DEFAULT_N_LIST)), help="comma-separated N values (at least 4)")
    cp.add_argument("--k", type=int, default=5)
    return parser


def config_from_args(args):
    """Validate everything that can be checked before any computation."""
    try:
        source, b = resolve_map(args)
    except (ValueError, OSError) as exc:
        raise UsageError(f"invalid map: {exc}") from None
    try:
        annulus = None if args.annulus is None else _parse_annulus(args.annulus)
    except ValueError as exc:
        raise UsageError(f"invalid annulus: {exc}") from None
    if args.margin < 0:
        raise UsageError("--margin must be >= 0")
    if args.k < 1:
        raise UsageError("--k must be >= 1")

    kw = dict(command=args.command, map_source=source, blaschke=b, M=args.M,
              annulus=annulus, margin=args.margin, seed=args.seed, k=args.k, out=args.out)
    if args.command == "converge":
        N_list = _parse_N_list(args.N)
        if len(N_list) < 4:
            raise UsageError(f"converge needs at least 4 N values, got {len(N_list)}")
        if any(n < 1 for n in N_list) or any(y <= x for x, y in zip(N_list, N_list[1:])):
            raise UsageError("N values must be positive and strictly increasing")
        if args.M is not None and args.M < default_M(max(N_list)):
            raise UsageError(f"-M must be >= 4(2N+1) = {default_M(max(N_list))}")
        return RunConfig(N_list=N_list, **kw)

    if args.N < 1:
        raise UsageError("-N must be >= 1")
    if args.M is not None and args.M < default_M(args.N):
        raise UsageError(f"-M must be >= 4(2N+1) = {default_M(args.N)}")
    if args.command == "spectrum":
        if args.k > 2 * args.N + 1:
            raise UsageError(f"--k={args.k} exceeds the matrix size 2N+1={2 * args.N + 1}")
        return RunConfig(N=args.N, dump=args.dump, **kw)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    return RunConfig(N=args.N, trials=args.trials, **kw)


# pipeline pieces -----------------------------------------------------------


def _certify(cfg):
    """Expansivity, annulus and fixed points; raises the mapped errors."""
    b = cfg.blaschke
    exp_ = expansivity_check(b)
    if not exp_.expanding:
        raise NotExpandingError(
            f"not expanding: min |B'| on the circle = {exp_.min_derivative_modulus:.6g} <= 1"
        )
    if cfg.annulus is not None:
        violated = check_annulus(b, cfg.annulus, margin=0.0)
        if violated:
            raise AnnulusError(f"annulus {cfg.annulus.r},{cfg.annulus.R} is not admissible", violated)
        a = cfg.annulus
    else:
        a = admissible_annulus(b, margin=cfg.margin)
    return exp_, a, fixed_points(b, exp_)


def _fixed_json(fp):
    return {
        "interior_point": complex_pair(fp.interior_point),
        "interior_multiplier": complex_pair(fp.interior_multiplier),
        "exterior_multiplier": complex_pair(fp.exterior_multiplier),
        "circle_points": [[complex_pair(p), complex_pair(m)] for p, m in fp.circle_points],
    }


def _expansivity_json(e):
    return {"sum_margin": e.sum_margin, "min_derivative_modulus": e.min_derivative_modulus,
            "argmin": e.argmin, "expanding": bool(e.expanding)}


def spectrum_report(cfg):
    b = cfg.blaschke
    exp_, a, fp = _certify(cfg)
    M = cfg.M or default_M(cfg.N)
    T = transfer_matrix(b, a, cfg.N, M)
    A = adjoint_block_matrix(b, a, cfg.N, M)
    direct = clean_eigenvalues(eig_dense(T.matrix))
    adj = clean_eigenvalues(eig_dense(A.matrix))
    predicted = closed_form_spectrum(b, cfg.k, fp)
    rep = match_spectrum(direct, predicted, cfg.k)
    kx = min(10, len(direct))
    report = {
        "config": cfg.resolved(a, M),
        "blaschke": b.to_json(),
        "annulus": a.to_json(),
        "N": cfg.N,
        "M": M,
        "seed": cfg.seed,
        "k": cfg.k,
        "eigenvalues": complex_list(direct),
        "eigenvalues_adjoint": complex_list(adj),
        "predicted": complex_list(predicted.values),
        "predicted_zero_padded": bool(predicted.zero_padded),
        "matched_pairs": [
            {"computed": complex_pair(c), "predicted": complex_pair(p), "error": e}
            for c, p, e in rep.matched_pairs
        ],
        "max_match_error": rep.max_match_error,
        "cross_validation": {"k": kx, "discrepancy": spectrum_discrepancy(direct, adj, kx)},
        "expansivity": _expansivity_json(exp_),
        "fixed_points": _fixed_json(fp),
        "flagged_columns": {
            "transfer": list(T.flagged_columns),
            "adjoint_disk": list(A.disk.flagged_columns),
            "adjoint_exterior": list(A.exterior.flagged_columns),
        },
    }
    if cfg.dump:
        _dump_matrices(cfg.dump, T, A, a, M)
    return report


def _dump_matrices(directory, T, A, a, M):
    os.makedirs(directory, exist_ok=True)
    head = dict(r=a.r, R=a.R, N=T.N, M=M)
    files = {
        "transfer.csv": matrix_to_csv(T.matrix, **head),
        "adjoint.csv": matrix_to_csv(A.matrix, **head, block="full"),
        "adjoint_disk.csv": matrix_to_csv(A.disk_block, **head, block="disk"),
        "adjoint_exterior.csv": matrix_to_csv(A.minus_block, **head, block="exterior"),
    }
    for name, text in files.items():
        Path(directory, name).write_text(text)


def _check(name, fn, threshold=None):
    threshold = THRESHOLDS[name] if threshold is None else threshold
    try:
        value = float(fn())
        return {"name": name, "value": value, "threshold": threshold, "passed": bool(value < threshold)}
    except (ValueError, NumericsError, np.linalg.LinAlgError) as exc:
        return {"name": name, "value": None, "threshold": threshold, "passed": False, "note": str(exc)}


def verify_report(cfg):
    b = cfg.blaschke
    exp_, a, fp = _certify(cfg)
    N = cfg.N
    M = cfg.M or default_M(N)
    lam = fp.interior_multiplier
    checks = []

    def match():
        pred = closed_form_spectrum(b, cfg.k, fp)
        direct = clean_eigenvalues(eig_dense(transfer_matrix(b, a, N, M).matrix))
        return match_spectrum(direct, pred, cfg.k).max_match_error

    def cross():
        direct = clean_eigenvalues(eig_dense(transfer_matrix(b, a, N, M).matrix))
        adj = clean_eigenvalues(eig_dense(adjoint_block_matrix(b, a, N, M).matrix))
        return spectrum_discrepancy(direct, adj, 10)

    checks.append(_check("spectrum_match", match))
    checks.append(_check("adjoint_identity",
                         lambda: adjoint_identity_residual(b, a, N, trials=cfg.trials, seed=cfg.seed)))
    checks.append(_check("cross_validation", cross))
    checks.append(_check("projected_spectrum", lambda: projected_spectrum_discrepancy(b, a, N, M)))

    if abs(b(0.0)) < 1e-12:
        adj = adjoint_block_matrix(b, a, N, M)
        upper, diag = triangularity(adj.disk, lam)
        checks.append(_check("triangularity_upper", lambda: upper))
        checks.append(_check("triangularity_diagonal", lambda: diag))
    else:
        for name in ("triangularity_upper", "triangularity_diagonal"):
            checks.append({"name": name, "value": None, "threshold": THRESHOLDS[name],
                           "passed": True, "note": "skipped: B(0) != 0"})

    rng = np.random.default_rng(cfg.seed)
    probes = np.concatenate([
        (a.r - 0.05) * rng.uniform(0, 1, 4) * np.exp(2j * np.pi * rng.uniform(0, 1, 4)),
        (a.R + 0.05) * (1 + rng.uniform(0, 1, 4)) * np.exp(2j * np.pi * rng.uniform(0, 1, 4)),
    ])
    checks.append(_check("kernel_reconstruction",
                         lambda: kernel_reconstruction_check(a, N, probes, seed=cfg.seed)))
    checks.append(_check("trace", lambda: trace_diagnostic(b, a, N, M, fp).deviation))
    checks.append(_check("fixed_point_conjugacy",
                         lambda: abs(fp.exterior_multiplier - np.conj(lam))))
    n_ok = len(fp.circle_points) == b.degree - 1 and all(abs(m) > 1 for _, m in fp.circle_points)
    checks.append({"name": "fixed_point_count", "value": len(fp.circle_points),
                   "threshold": b.degree - 1, "passed": bool(n_ok)})

    failed = [c["name"] for c in checks if not c["passed"]]
    report = {
        "config": cfg.resolved(a, M),
        "blaschke": b.to_json(),
        "annulus": a.to_json(),
        "N": N,
        "M": M,
        "seed": cfg.seed,
        "checks": checks,
        "passed": not failed,
    }
    if failed:
        report["error"] = {"kind": "checks_failed", "failed": failed}
    return report


def converge_result(cfg):
    _, a, _ = _certify(cfg)
    rule = default_M if cfg.M is None else (lambda N, M=cfg.M: M)
    return convergence_study(cfg.blaschke, cfg.N_list, M_rule=rule, annulus=a, k=cfg.k)


# entry point ---------------------------------------------------------------


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _error(kind, message, code, out=None, **extra):
    payload = {"error": {"kind": kind, "message": message, "exit_code": code, **extra}}
    print(message, file=sys.stderr)
    _emit(dumps_report(payload), out)
    return code


def _guarded(run):
    """Map pipeline exceptions of ``run(cfg)`` onto exit codes and error payloads."""
    def cmd(cfg):
        try:
            return run(cfg)
        except NotExpandingError as exc:
            return _error("not_expanding", str(exc), EXIT_NOT_EXPANDING, cfg.out)
        except AnnulusError as exc:
            return _error("no_admissible_annulus", str(exc), EXIT_NO_ANNULUS, cfg.out,
                          violated=list(exc.violated))
        except (NumericsError, np.linalg.LinAlgError, ValueError) as exc:
            return _error("numerics", str(exc), EXIT_NUMERICS, cfg.out)
    cmd.__name__ = run.__name__
    cmd.__doc__ = run.__doc__
    return cmd


@_guarded
def cmd_spectrum(cfg):
    """Write the spectrum report; returns the exit code."""
    _emit(dumps_report(spectrum_report(cfg)), cfg.out)
    return EXIT_OK


@_guarded
def cmd_verify(cfg):
    """Write the verification report; exit 4 if any check misses its threshold."""
    report = verify_report(cfg)
    _emit(dumps_report(report), cfg.out)
    if not report["passed"]:
        print("failed checks: " + ", ".join(report["error"]["failed"]), file=sys.stderr)
        return EXIT_NUMERICS
    return EXIT_OK


@_guarded
def cmd_converge(cfg):
    """CSV table to the output, fit summary to stderr."""
    result = converge_result(cfg)
    _emit(result.to_csv(), cfg.out)
    print(result.summary(), file=sys.stderr)
    return EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "verify": cmd_verify, "converge": cmd_converge}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: spectrum, verify or converge")
        cfg = config_from_args(args)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        return _error("usage", str(exc), EXIT_USAGE)
    return COMMANDS[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
