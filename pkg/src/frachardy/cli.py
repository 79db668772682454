"""Command-line interface.

Each subcommand computes one object and writes a CSV table or a JSON report
to stdout or ``--output``. Exit codes: 0 pass, 1 failed verification,
2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import numpy as np

from .criticality import (
    gsr_residual,
    hardy_constant_estimate,
    null_criticality_increments,
    null_criticality_sum,
    null_energy_curve,
)
from .errors import DomainError, FracHardyError
from .hardy_weights import WeightSpec, critical_alpha, hardy_weight, weight_comparison
from .kernel import LatticeFunction, kernel_section, potential_term
from .riesz import green_function, riesz_potential
from .verification import (
    VerificationReport,
    appendix_suite,
    asymptotics_suite,
    mellin_suite,
    signs_suite,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITES = ("appendix", "signs", "mellin", "asymptotics")


@dataclass
class RunConfig:
    command: str
    sigma: float | None = None
    alpha: float | None = None
    n: int | None = None
    n_max: int | None = None
    window_start: int = 1
    tol: float | None = None
    seed: int = 0
    trials: int = 100
    support: int = 30
    k_list: tuple[int, ...] = (8, 16, 32, 64)
    n_list: tuple[int, ...] = (1_000, 10_000, 100_000)
    suite: str | None = None
    output_path: str | None = None
    format: str = "csv"


@dataclass
class Result:
    """A table (columns + rows) or a JSON-ready payload, plus the verdict."""

    columns: list | None = None
    rows: list | None = None
    payload: dict | None = None
    passed: bool = True


# --- encoding --------------------------------------------------------------------


def _cell(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def _plain(x):
    """Convert numpy scalars and containers to JSON-native values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def encode_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(c) for c in r])
    return buf.getvalue()


def encode_json(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _report_table(report: VerificationReport):
    cols = ["suite", "name", "parameters", "lhs", "rhs", "abs_residual", "tolerance", "pass"]
    rows = [
        [report.suite, r.name, json.dumps(_plain(r.parameters), sort_keys=True), r.lhs, r.rhs, r.abs_residual, r.tolerance, r.passed]
        for r in report.records
    ]
    return cols, rows


# --- commands -----------------------------------------------------------------------


def _need(cfg: RunConfig, name: str):
    val = getattr(cfg, name)
    if val is None:
        raise DomainError(f"--{name.replace('_', '-')} is required for {cfg.command}")
    return val


def _cmd_kernel(cfg):
    s, N = _need(cfg, "sigma"), _need(cfg, "n")
    A = kernel_section(s, N, start=cfg.window_start)
    idx = range(cfg.window_start, cfg.window_start + N)
    cols = ["m"] + [f"K_sigma[m,{j}]" for j in idx]
    rows = [[i] + list(A[r]) for r, i in enumerate(idx)]
    return Result(cols, rows)


def _cmd_potential(cfg):
    s, n_max = _need(cfg, "sigma"), _need(cfg, "n_max")
    n = np.arange(1, n_max + 1)
    return Result(["n", "R_sigma"], [list(r) for r in zip(n, potential_term(s, n))])


def _cmd_riesz(cfg):
    a, n_max = _need(cfg, "alpha"), _need(cfg, "n_max")
    n = np.arange(1, n_max + 1)
    return Result(["n", "I_alpha"], [list(r) for r in zip(n, riesz_potential(a, n))])


def _cmd_green(cfg):
    s, n_max = _need(cfg, "sigma"), _need(cfg, "n_max")
    n = np.arange(1, n_max + 1)
    return Result(["n", "G_sigma"], [list(r) for r in zip(n, green_function(s, n))])


def _cmd_weights(cfg):
    s, n_max = _need(cfg, "sigma"), _need(cfg, "n_max")
    a = critical_alpha(s) if cfg.alpha is None else cfg.alpha
    name = "W_op_sigma" if cfg.alpha is None else "W_alpha_sigma"
    n = np.arange(1, n_max + 1)
    return Result(["n", name], [list(r) for r in zip(n, hardy_weight(WeightSpec(s, a), n))])


def _cmd_compare_kpp(cfg):
    n_max = _need(cfg, "n_max")
    cmp = weight_comparison(n_max)
    rows = [list(r) for r in zip(cmp.n, cmp.kpp, cmp.op1, cmp.diff)]
    ok = cmp.kpp_larger_at_1 and cmp.op_larger_beyond_crossing
    return Result(["n", "W_KPP", "W_op_1", "diff"], rows, passed=ok)


def _random_phi(rng, support: int) -> LatticeFunction:
    length = int(rng.integers(1, support + 1))
    start = int(rng.integers(1, support + 1))
    return LatticeFunction(start, rng.uniform(-1.0, 1.0, length))


def _cmd_gsr_check(cfg):
    s, a = _need(cfg, "sigma"), _need(cfg, "alpha")
    rng = np.random.default_rng(cfg.seed)
    records = []
    for trial in range(cfg.trials):
        phi = _random_phi(rng, cfg.support)
        chk = gsr_residual(s, a, phi)
        records.append(
            {
                "trial": trial,
                "support_start": phi.support_start,
                "support_len": int(phi.values.size),
                "residual": chk.residual,
                "tolerance": chk.tolerance,
                "tail": chk.simplified.truncation_tail,
                "pass": chk.passed,
            }
        )
    passed = all(r["pass"] for r in records)
    cols = ["trial", "support_start", "support_len", "residual", "tolerance", "tail", "pass"]
    rows = [[r[c] for c in cols] for r in records]
    payload = {"sigma": s, "alpha": a, "seed": cfg.seed, "abs_tol": 1e-8, "pass": passed, "records": records}
    return Result(cols, rows, payload, passed)


def _cmd_null_sequence(cfg):
    s = _need(cfg, "sigma")
    a = critical_alpha(s) if cfg.alpha is None else cfg.alpha
    curve = null_energy_curve(s, a, cfg.k_list)
    cols = ["k", "Q_alpha_sigma", "tail_lo", "tail_hi", "Q_log_k"]
    rows = [[k, r.value, r.tail_lo, r.tail_hi, r.value * np.log(k)] for k, r in curve]
    return Result(cols, rows)


def _cmd_null_critical(cfg):
    s = _need(cfg, "sigma")
    a = critical_alpha(s) if cfg.alpha is None else cfg.alpha
    inc = null_criticality_increments(s, a, cfg.n_list)
    rows = []
    for N, d in zip(inc.N, inc.increments):
        rows.append([N, null_criticality_sum(s, a, N), d, inc.expected_exponent])
    return Result(["N", "S_N", "S_2N_minus_S_N", "expected_exponent"], rows)


def _cmd_hardy_constant(cfg):
    s, N = _need(cfg, "sigma"), _need(cfg, "n")
    est = hardy_constant_estimate(s, N, cfg.window_start)
    cols = ["sigma", "window_start", "window_len", "lambda_min", "iterations"]
    return Result(cols, [[s, est.window_start, est.window_len, est.lambda_min, est.iterations]])


def _cmd_verify(cfg):
    suite = _need(cfg, "suite")
    if suite == "appendix":
        report = appendix_suite(cfg.seed)
    elif suite == "signs":
        report = signs_suite(cfg.n or 200)
    elif suite == "mellin":
        report = mellin_suite(rel_tol=cfg.tol or 1e-3)
    elif suite == "asymptotics":
        report = asymptotics_suite()
    else:
        raise DomainError(f"unknown suite {suite!r}")
    cols, rows = _report_table(report)
    return Result(cols, rows, report.to_dict(), report.passed)


COMMANDS = {
    "kernel": _cmd_kernel,
    "potential": _cmd_potential,
    "riesz": _cmd_riesz,
    "green": _cmd_green,
    "weights": _cmd_weights,
    "compare-kpp": _cmd_compare_kpp,
    "gsr-check": _cmd_gsr_check,
    "null-sequence": _cmd_null_sequence,
    "null-critical": _cmd_null_critical,
    "hardy-constant": _cmd_hardy_constant,
    "verify": _cmd_verify,
}


def render(cfg: RunConfig, res: Result) -> str:
    if cfg.format == "csv":
        return encode_csv(res.columns, res.rows)
    if res.payload is not None:
        return encode_json({"command": cfg.command, **res.payload})
    return encode_json({"command": cfg.command, "columns": res.columns, "rows": res.rows, "pass": res.passed})


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one command; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    if cfg.command not in COMMANDS:
        print(f"error: unknown command {cfg.command!r}", file=stderr)
        return EXIT_USAGE
    if cfg.format not in ("csv", "json"):
        print(f"error: --format must be csv or json, got {cfg.format!r}", file=stderr)
        return EXIT_USAGE
    try:
        res = COMMANDS[cfg.command](cfg)
    except DomainError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except FracHardyError as exc:
        print(f"failed: {exc}", file=stderr)
        return EXIT_FAIL
    text = render(cfg, res)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_PASS if res.passed else EXIT_FAIL


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="frachardy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, *flags):
        sp = sub.add_parser(name, help=help_)
        for f in flags:
            f(sp)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", dest="output_path", default=None, help="write here instead of stdout")
        return sp

    sigma = lambda sp: sp.add_argument("--sigma", type=float, required=True)
    alpha_req = lambda sp: sp.add_argument("--alpha", type=float, required=True)
    alpha_opt = lambda sp: sp.add_argument("--alpha", type=float, default=None, help="defaults to (3 + 2 sigma) / 4")
    n_max = lambda sp: sp.add_argument("--n-max", dest="n_max", type=int, required=True)
    n_req = lambda sp: sp.add_argument("--n", type=int, required=True)
    start = lambda sp: sp.add_argument("--window-start", dest="window_start", type=int, default=1)
    seed = lambda sp: sp.add_argument("--seed", type=int, default=0)

    add("kernel", "dense kernel section", sigma, n_req, start)
    add("potential", "potential term R_sigma(n)", sigma, n_max)
    add("riesz", "Riesz potential I_alpha(n)", alpha_req, n_max)
    add("green", "Green function G_sigma(n)", sigma, n_max)
    add("weights", "Hardy weight table", sigma, alpha_opt, n_max)
    add("compare-kpp", "KPP weight against the optimal sigma = 1 weight", n_max)

    def gsr_flags(sp):
        sp.add_argument("--trials", type=int, default=100)
        sp.add_argument("--support", type=int, default=30)

    add("gsr-check", "ground-state representation on random functions", sigma, alpha_req, seed, gsr_flags)
    add(
        "null-sequence",
        "energies of the logarithmic null-sequence",
        sigma,
        alpha_opt,
        lambda sp: sp.add_argument("--k-list", dest="k_list", type=_int_list, default=(8, 16, 32, 64)),
    )
    add(
        "null-critical",
        "partial sums I_alpha * I_(alpha - sigma)",
        sigma,
        alpha_opt,
        lambda sp: sp.add_argument("--n-list", dest="n_list", type=_int_list, default=(1_000, 10_000, 100_000)),
    )
    add("hardy-constant", "smallest Rayleigh quotient on a window", sigma, n_req, start)

    def verify_flags(sp):
        sp.add_argument("suite", choices=SUITES)
        sp.add_argument("--n", type=int, default=None, help="section size for the signs suite")
        sp.add_argument("--tol", type=float, default=None, help="relative tolerance for the mellin suite")

    add("verify", "run a verification suite", seed, verify_flags)
    return p


def parse_config(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    known = {f for f in RunConfig.__dataclass_fields__}
    return RunConfig(**{k: v for k, v in ns.items() if k in known})


def main(argv=None) -> int:
    cfg = parse_config(argv)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
