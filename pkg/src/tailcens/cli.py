"""Command-line front end.

Subcommands:
  estimate     tail index estimates on a dataset over a k-range (CSV to stdout)
  contaminate  replace the largest uncensored times by outlier values
  sweep        Monte Carlo bias/MSE sweep from a key=value config file
  constants    asymptotic constants table for one (alpha, gamma1, p, tau1)
  synth        generate a synthetic censored dataset with the standard schema

Datasets are CSV files with header exactly "time,status" (status 1 =
event observed, 0 = censored).  All output is comma-separated with "."
decimals and LF line endings.  Exit codes: 0 success, 1 user error,
2 internal error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .asymptotics import (GaussianOracleConfig, eta_star, mu, sigma_squared,
                          sigma_squared_mc)
from .estimators import (EstimationError, SolverOptions, censored_proportion,
                         efg_estimator, hill_gamma, mdpd_estimate,
                         worms_estimator)
from .sample_model import InvalidSampleError, ModelParams, TailConfig, ordered_from_arrays
from .simulation import (ContaminationSpec, SweepSpec, gamma2_from_p,
                         run_sweep, sample_contaminated_censored)

# Ten outlier values (and the original times they replaced in the study
# that motivated this workflow), largest original -> largest replacement.
DEFAULT_OUTLIER_TABLE: tuple[tuple[float, float], ...] = (
    (1976.0, 36500.0),
    (2102.0, 40555.56),
    (2117.0, 45625.0),
    (2151.0, 52142.86),
    (2183.0, 60833.33),
    (2228.0, 73000.0),
    (2252.0, 91250.0),
    (2295.0, 121666.67),
    (2453.0, 182500.0),
    (2470.0, 365000.0),
)


class CliError(Exception):
    """User-facing error: message printed to stderr, exit code 1."""


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def read_dataset(path: str) -> tuple[list[float], list[int]]:
    """Parse a time,status CSV; errors name the offending line number."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    if not lines or lines[0].strip() != "time,status":
        raise CliError(f'{path}: missing header "time,status"')
    times: list[float] = []
    statuses: list[int] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise CliError(f"{path}: malformed row at line {lineno}")
        try:
            t = float(parts[0])
            s = int(parts[1])
        except ValueError as exc:
            raise CliError(f"{path}: malformed row at line {lineno}") from exc
        if not (t > 0) or s not in (0, 1):
            raise CliError(f"{path}: invalid observation at line {lineno}")
        times.append(t)
        statuses.append(s)
    if not times:
        raise CliError(f"{path}: empty dataset")
    return times, statuses


def write_dataset(times: list[float], statuses: list[int], out) -> None:
    out.write("time,status\n")
    for t, s in zip(times, statuses):
        out.write(f"{_fmt(t)},{s}\n")


def _k_range(args, n: int) -> list[int]:
    k_max = args.k_max if args.k_max is not None else args.k_min
    ks = list(range(args.k_min, k_max + 1, args.k_step))
    if not ks:
        raise CliError("empty k range")
    if ks[-1] >= n:
        raise CliError(f"k={ks[-1]} must be below the sample size n={n}")
    return ks


def cmd_estimate(args) -> int:
    times, statuses = read_dataset(args.file)
    sample = ordered_from_arrays(times, statuses)
    ks = _k_range(args, sample.n)
    alphas = args.alpha if args.alpha else [0.0]
    lo, hi = args.domain
    options = SolverOptions(domain_lo=lo, domain_hi=hi, tol_abs=args.tol)
    out = sys.stdout
    out.write("k,alpha,method,gamma1_hat,residual\n")
    for k in ks:
        if args.with_competitors:
            for name, fn in (("Hill", hill_gamma), ("EFG", efg_estimator),
                             ("Worms", worms_estimator)):
                try:
                    out.write(f"{k},,{name},{_fmt(fn(sample, k))},\n")
                except EstimationError:
                    out.write(f"{k},,{name},,\n")
        for alpha in alphas:
            try:
                result = mdpd_estimate(sample, TailConfig(k=k, alpha=alpha), options)
                out.write(f"{k},{_fmt(alpha)},{result.method},"
                          f"{_fmt(result.gamma1_hat)},{_fmt(result.residual)}\n")
            except EstimationError:
                out.write(f"{k},{_fmt(alpha)},MDPD,,\n")
    return 0


def _load_injection_table(path: str) -> list[tuple[float, float]]:
    table = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.strip().startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise CliError(f"{path}: malformed injection row at line {lineno}")
        try:
            table.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise CliError(f"{path}: malformed injection row at line {lineno}") from exc
    return table


def cmd_contaminate(args) -> int:
    times, statuses = read_dataset(args.file)
    table = _load_injection_table(args.table) if args.table else list(DEFAULT_OUTLIER_TABLE)
    m = len(table)
    uncensored = [i for i, s in enumerate(statuses) if s == 1]
    if len(uncensored) < m:
        raise CliError(
            f"dataset has {len(uncensored)} uncensored rows; injection table needs {m}")
    # the m largest uncensored times, matched to replacements in descending order
    targets = sorted(uncensored, key=lambda i: times[i], reverse=True)[:m]
    replacements = sorted((r for _, r in table), reverse=True)
    new_times = list(times)
    for idx, repl in zip(targets, replacements):
        new_times[idx] = repl
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_dataset(new_times, statuses, fh)
    else:
        write_dataset(new_times, statuses, sys.stdout)
    return 0


_SWEEP_KEYS = {"n", "replicates", "gamma1", "p", "eta", "epsilon", "theta1",
               "alphas", "k_min", "k_max", "k_step", "seed"}


def parse_sweep_config(path: str) -> dict:
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    for line in lines:
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise CliError(f"invalid config line: {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _SWEEP_KEYS:
            raise CliError(f"invalid config key: {key!r}")
        values[key] = raw.strip()
    for required in ("n", "gamma1", "p"):
        if required not in values:
            raise CliError(f"missing config key: {required!r}")
    return values


def build_sweep_spec(values: dict, replicates_override: int | None = None,
                     seed_override: int | None = None) -> SweepSpec:
    try:
        n = int(values["n"])
        gamma1 = float(values["gamma1"])
        p = float(values["p"])
        eta = float(values.get("eta", "0.25"))
        epsilon = float(values.get("epsilon", "0"))
        theta1 = float(values.get("theta1", values["gamma1"]))
        replicates = int(values.get("replicates", "200"))
        seed = int(values.get("seed", "0"))
        alphas = tuple(float(a) for a in values.get("alphas", "0,0.1,0.3,0.5").split(","))
        k_min = int(values.get("k_min", "50"))
        k_max = int(values.get("k_max", str(max(k_min, n // 2))))
        k_step = int(values.get("k_step", "50"))
    except ValueError as exc:
        raise CliError(f"invalid config value: {exc}") from exc
    if replicates_override is not None:
        replicates = replicates_override
    if seed_override is not None:
        seed = seed_override
    gamma2 = gamma2_from_p(gamma1, p)
    model = ModelParams(gamma1=gamma1, gamma2=gamma2, eta=eta)
    contamination = ContaminationSpec(epsilon=epsilon, theta1=theta1, eta=eta)
    k_grid = tuple(range(k_min, k_max + 1, k_step))
    try:
        return SweepSpec(n=n, replicates=replicates, model=model,
                         contamination=contamination, alphas=alphas,
                         k_grid=k_grid, seed=seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def cmd_sweep(args) -> int:
    import os

    values = parse_sweep_config(args.config)
    replicates = 2000 if args.full_scale else args.replicates
    spec = build_sweep_spec(values, replicates_override=replicates,
                            seed_override=args.seed)
    result = run_sweep(spec, n_jobs=args.threads)

    os.makedirs(args.output_dir, exist_ok=True)
    main_path = os.path.join(args.output_dir, "sweep.csv")
    with open(main_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("k,alpha,abs_bias,mse,n_failures\n")
        for k, alpha, abs_bias, mse, failures in result.rows:
            fh.write(f"{k},{_fmt(alpha)},{_fmt(abs_bias)},{_fmt(mse)},{failures}\n")

    # per-panel plot data: one series (column) per alpha, indexed by k
    eps = spec.contamination.epsilon
    by_cell = {(k, a): (b, m) for k, a, b, m, _ in result.rows}
    header = "k," + ",".join(f"alpha={_fmt(a)}" for a in spec.alphas)
    panels = {
        os.path.join(args.output_dir, f"bias_eps{eps:.2f}.csv"): 0,
        os.path.join(args.output_dir, f"mse_eps{eps:.2f}.csv"): 1,
    }
    for path, which in panels.items():
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(header + "\n")
            for k in spec.k_grid:
                cells = ",".join(_fmt(by_cell[(k, a)][which]) for a in spec.alphas)
                fh.write(f"{k},{cells}\n")

    if args.emit_svg:
        for path, which in panels.items():
            _emit_svg(path.replace(".csv", ".svg"), spec, by_cell, which)
    return 0


def _emit_svg(path: str, spec: SweepSpec, by_cell: dict, which: int) -> None:
    """Minimal static line plot of the panel data; convenience only."""
    width, height, pad = 640, 400, 50
    ks = list(spec.k_grid)
    series = {a: [by_cell[(k, a)][which] for k in ks] for a in spec.alphas}
    finite = [v for vs in series.values() for v in vs if np.isfinite(v)]
    if not finite:
        return
    y_max = max(finite) or 1.0
    x_span = max(ks) - min(ks) or 1

    def sx(k):
        return pad + (k - min(ks)) / x_span * (width - 2 * pad)

    def sy(v):
        return height - pad - (v / y_max) * (height - 2 * pad)

    colors = ["#1b6ca8", "#c0392b", "#27ae60", "#8e44ad", "#d35400"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<line x1="{pad}" y1="{height-pad}" x2="{width-pad}" y2="{height-pad}" stroke="black"/>',
             f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height-pad}" stroke="black"/>']
    for idx, (alpha, vals) in enumerate(series.items()):
        pts = " ".join(f"{sx(k):.1f},{sy(v):.1f}" for k, v in zip(ks, vals)
                       if np.isfinite(v))
        color = colors[idx % len(colors)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}"/>')
        parts.append(f'<text x="{width-pad+4}" y="{pad+14*idx+10}" font-size="11" '
                     f'fill="{color}">a={_fmt(alpha)}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(parts) + "\n")


def cmd_constants(args) -> int:
    if args.alpha <= 0:
        raise CliError("constants requires alpha > 0")
    if not 0 < args.p < 1:
        raise CliError("p must lie in (0, 1)")
    if args.p <= 0.5:
        raise CliError("variance formula requires p > 1/2")
    gamma2 = gamma2_from_p(args.gamma1, args.p)
    try:
        sigma2 = sigma_squared(args.alpha, args.gamma1, gamma2)
        config = GaussianOracleConfig(seed=args.seed, replicates=args.replicates)
        sigma2_mc, stderr = sigma_squared_mc(args.alpha, args.gamma1, gamma2, config)
        mu_value = mu(args.alpha, args.gamma1, args.tau1, check_closed_form=False)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    sys.stdout.write("alpha,gamma1,gamma2,p,tau1,eta_star,mu,sigma2,sigma2_mc,mc_stderr\n")
    row = (args.alpha, args.gamma1, gamma2, args.p, args.tau1,
           eta_star(args.alpha, args.gamma1), mu_value, sigma2, sigma2_mc, stderr)
    sys.stdout.write(",".join(_fmt(v) for v in row) + "\n")
    return 0


def cmd_synth(args) -> int:
    gamma2 = gamma2_from_p(args.gamma1, args.p)
    model = ModelParams(gamma1=args.gamma1, gamma2=gamma2, eta=args.eta)
    contamination = ContaminationSpec(epsilon=args.epsilon, theta1=args.theta1,
                                      eta=args.eta)
    observations = sample_contaminated_censored(args.n, model, contamination,
                                                seed=args.seed)
    times = [o.z * args.scale for o in observations]
    statuses = [o.delta for o in observations]
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_dataset(times, statuses, fh)
    else:
        write_dataset(times, statuses, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailcens",
                                     description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="tail index estimates over a k-range")
    est.add_argument("file", help="dataset CSV (header: time,status)")
    est.add_argument("--k-min", type=int, required=True)
    est.add_argument("--k-max", type=int, default=None)
    est.add_argument("--k-step", type=int, default=1)
    est.add_argument("--alpha", type=float, action="append", default=None,
                     help="MDPD tuning parameter; repeatable (default 0)")
    est.add_argument("--with-competitors", action="store_true",
                     help="also emit Hill, EFG and Worms rows")
    est.add_argument("--tol", type=float, default=1e-10)
    est.add_argument("--domain", type=float, nargs=2, default=(1e-6, 50.0),
                     metavar=("LO", "HI"))
    est.set_defaults(func=cmd_estimate)

    con = sub.add_parser("contaminate", help="inject outliers into a dataset")
    con.add_argument("file")
    con.add_argument("--table", default=None,
                     help="CSV of original,replacement pairs (default: built-in table)")
    con.add_argument("--output", default=None, help="write here instead of stdout")
    con.set_defaults(func=cmd_contaminate)

    swp = sub.add_parser("sweep", help="Monte Carlo bias/MSE sweep")
    swp.add_argument("config", help="key = value config file")
    swp.add_argument("--output-dir", default=".")
    swp.add_argument("--replicates", type=int, default=None,
                     help="override config replicate count")
    swp.add_argument("--full-scale", action="store_true",
                     help="run 2000 replicates regardless of config")
    swp.add_argument("--seed", type=int, default=None)
    swp.add_argument("--threads", type=int, default=1)
    swp.add_argument("--emit-svg", action="store_true")
    swp.set_defaults(func=cmd_sweep)

    cst = sub.add_parser("constants", help="asymptotic constants table")
    cst.add_argument("--alpha", type=float, required=True)
    cst.add_argument("--gamma1", type=float, required=True)
    cst.add_argument("--p", type=float, required=True)
    cst.add_argument("--tau1", type=float, default=0.0)
    cst.add_argument("--seed", type=int, default=0)
    cst.add_argument("--replicates", type=int, default=4000)
    cst.set_defaults(func=cmd_constants)

    syn = sub.add_parser("synth", help="generate a synthetic censored dataset")
    syn.add_argument("--n", type=int, required=True)
    syn.add_argument("--gamma1", type=float, required=True)
    syn.add_argument("--p", type=float, required=True)
    syn.add_argument("--eta", type=float, default=0.25)
    syn.add_argument("--epsilon", type=float, default=0.0)
    syn.add_argument("--theta1", type=float, default=1.0)
    syn.add_argument("--scale", type=float, default=1.0,
                     help="multiply all times by this constant")
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--output", default=None)
    syn.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InvalidSampleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
