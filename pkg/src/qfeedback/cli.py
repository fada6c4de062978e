"""Command-line front end: single-point reports, CSV sweeps, F_dif search, certification.

Exit codes: 0 success, 1 parameter error, 2 certification failure, 3 I/O error.
Angles are radians.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal

import numpy as np

from . import certify, schemes
from .schemes import TaskParams

EXIT_OK, EXIT_PARAM, EXIT_CERT, EXIT_IO = 0, 1, 2, 3
SIG_DIGITS = 12
GOLDEN = (math.sqrt(5) - 1) / 2

SCHEME_COLUMNS = {
    "nothing": ["f_n"],
    "dr1": ["f_dr1"],
    "dr2": ["f_dr2"],
    "qc": ["f_qc_opt", "chi_opt"],
    "all": ["f_n", "f_dr1", "f_dr2", "f_qc_opt", "chi_opt", "f_dif"],
}


class ParameterError(ValueError):
    pass


def format_number(x: float) -> str:
    """Shortest round-trip decimal, truncated to 12 significant digits."""
    d = Decimal(repr(float(x)))
    if d.is_zero():
        return "0"
    d = d.quantize(Decimal(1).scaleb(d.adjusted() - SIG_DIGITS + 1), rounding=ROUND_DOWN).normalize()
    if -7 <= d.adjusted() < SIG_DIGITS:
        return format(d, "f")
    return format(d, "e")


@dataclass(frozen=True)
class SweepConfig:
    p_min: float = 0.0
    p_max: float = 0.5
    p_steps: int = 10
    theta_min: float = 0.0
    theta_max: float = math.pi / 2
    theta_steps: int = 10
    chi_steps: int | None = None
    scheme: str = "all"

    def __post_init__(self):
        if not 0.0 <= self.p_min <= self.p_max <= 0.5:
            raise ParameterError(f"p range [{self.p_min}, {self.p_max}] must lie within [0, 0.5]")
        if not 0.0 <= self.theta_min <= self.theta_max <= math.pi / 2:
            raise ParameterError(f"theta range [{self.theta_min}, {self.theta_max}] must lie within [0, pi/2]")
        for name, lo, hi, steps in (
            ("p", self.p_min, self.p_max, self.p_steps),
            ("theta", self.theta_min, self.theta_max, self.theta_steps),
        ):
            # a single step is only meaningful for a pinned value
            if steps < 2 and not (steps == 1 and lo == hi):
                raise ParameterError(f"{name} steps must be >= 2 (got {steps})")
        if self.chi_steps is not None and self.chi_steps < 2:
            raise ParameterError(f"chi steps must be >= 2 (got {self.chi_steps})")
        if self.scheme not in SCHEME_COLUMNS:
            raise ParameterError(f"scheme must be one of {sorted(SCHEME_COLUMNS)}")

    def axis(self, lo: float, hi: float, steps: int) -> np.ndarray:
        return np.array([lo]) if steps == 1 else np.linspace(lo, hi, steps)

    @property
    def p_values(self) -> np.ndarray:
        return self.axis(self.p_min, self.p_max, self.p_steps)

    @property
    def theta_values(self) -> np.ndarray:
        return self.axis(self.theta_min, self.theta_max, self.theta_steps)

    @property
    def chi_values(self) -> np.ndarray | None:
        return None if self.chi_steps is None else np.linspace(0.0, math.pi / 2, self.chi_steps)

    def columns(self) -> list[str]:
        cols = ["p", "theta"]
        if self.chi_steps is not None:
            cols += ["chi", "f_qc"]
        return cols + SCHEME_COLUMNS[self.scheme]


def point_values(p: float, theta: float) -> dict[str, float]:
    task = TaskParams(p, theta)
    return {
        "f_n": schemes.do_nothing_fidelity(task),
        "f_dr1": schemes.dr_fidelity(1, theta),
        "f_dr2": schemes.dr_fidelity(2, theta),
        "f_qc_opt": schemes.fqc_opt(task),
        "chi_opt": schemes.chi_opt(task),
        "f_dif": schemes.f_dif(task),
    }


def sweep_rows(config: SweepConfig):
    """Rows in index order: p outermost, then theta, then chi."""
    cols = config.columns()
    chis = config.chi_values
    for p in config.p_values:
        for theta in config.theta_values:
            values = point_values(float(p), float(theta))
            values.update(p=float(p), theta=float(theta))
            if chis is None:
                yield [values[c] for c in cols]
                continue
            task = TaskParams(float(p), float(theta))
            for chi in chis:
                values.update(chi=float(chi), f_qc=schemes.fqc(task, float(chi)))
                yield [values[c] for c in cols]


def write_sweep(config: SweepConfig, stream) -> int:
    stream.write(",".join(config.columns()) + "\n")
    n = 0
    for row in sweep_rows(config):
        stream.write(",".join(format_number(v) for v in row) + "\n")
        n += 1
    return n


# --- F_dif maximum -----------------------------------------------------------


def golden_section_max(f, lo: float, hi: float, iterations: int = 20) -> tuple[float, float]:
    """(argmax, max) of a unimodal ``f`` on [lo, hi]."""
    a, b = lo, hi
    c, d = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iterations):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


OUTER_ITERATIONS = 20
# The maximum sits on the crease F_DR2 = F_N; the inner search must resolve
# the crease to ~1e-9 in p or the outer comparisons drown in its error.
INNER_ITERATIONS = 40


def find_max_fdif(grid: int, p_range=(0.0, 0.5), theta_range=(0.0, math.pi / 2)) -> tuple[float, float, float]:
    """Grid argmax of F_dif, then nested golden-section refinement.

    The outer search runs over theta; each theta is scored by a golden-section
    maximisation over p. Searching both axes jointly this way follows the
    ridge of maxima, where alternating one-axis searches stall on its crease.
    """
    ps = np.linspace(*p_range, grid)
    thetas = np.linspace(*theta_range, grid)
    values = schemes.f_dif_value(ps[:, None], thetas[None, :])
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    grid_best = (float(ps[i]), float(thetas[j]), float(values[i, j]))
    dp = (p_range[1] - p_range[0]) / (grid - 1)
    dt = (theta_range[1] - theta_range[0]) / (grid - 1)
    p_lo = max(p_range[0], grid_best[0] - max(10 * dp, 0.05))
    p_hi = min(p_range[1], grid_best[0] + max(10 * dp, 0.05))
    t_lo = max(theta_range[0], grid_best[1] - 5 * dt)
    t_hi = min(theta_range[1], grid_best[1] + 5 * dt)

    def best_p(theta):
        return golden_section_max(lambda p: float(schemes.f_dif_value(p, theta)), p_lo, p_hi, INNER_ITERATIONS)

    t_star, _ = golden_section_max(lambda t: best_p(t)[1], t_lo, t_hi, OUTER_ITERATIONS)
    p_star, refined = best_p(t_star)
    if refined < grid_best[2]:
        return grid_best
    return p_star, t_star, refined


# --- commands ----------------------------------------------------------------


def cmd_fidelity(args) -> int:
    task = TaskParams(args.p, args.theta)
    chi = schemes.chi_opt(task) if args.chi is None else args.chi
    eta = schemes.eta_opt(task, chi)
    fields = [
        ("p", task.p), ("theta", task.theta), ("chi", chi), ("eta", eta),
        ("f_n", schemes.do_nothing_fidelity(task)),
        ("f_dr1", schemes.dr_fidelity(1, task.theta)),
        ("f_dr2", schemes.dr_fidelity(2, task.theta)),
        ("f_qc", schemes.fqc(task, chi)),
        ("f_qc_opt", schemes.fqc_opt(task)),
        ("chi_opt", schemes.chi_opt(task)),
        ("f_dif", schemes.f_dif(task)),
    ]
    print(" ".join(f"{k}={format_number(v)}" for k, v in fields))
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = build_sweep_config(args)
    if args.out in (None, "-"):
        write_sweep(config, sys.stdout)
        return EXIT_OK
    try:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            n = write_sweep(config, fh)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {n} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def build_sweep_config(args) -> SweepConfig:
    steps = args.grid or 10
    p_lo, p_hi = (args.p, args.p) if args.p is not None else tuple(args.p_range)
    t_lo, t_hi = (args.theta, args.theta) if args.theta is not None else tuple(args.theta_range)
    return SweepConfig(
        p_min=p_lo, p_max=p_hi, p_steps=1 if args.p is not None else (args.p_steps or steps),
        theta_min=t_lo, theta_max=t_hi,
        theta_steps=1 if args.theta is not None else (args.theta_steps or steps),
        chi_steps=args.chi_steps, scheme=args.scheme,
    )


def cmd_find_max_fdif(args) -> int:
    if args.grid < 100:
        raise ParameterError(f"grid must be >= 100 (got {args.grid})")
    p_range, theta_range = tuple(args.p_range), tuple(args.theta_range)
    SweepConfig(p_min=p_range[0], p_max=p_range[1], theta_min=theta_range[0], theta_max=theta_range[1])
    p, theta, value = find_max_fdif(args.grid, p_range, theta_range)
    print(f"p*={format_number(p)} theta*={format_number(theta)} f_dif*={format_number(value)}")
    return EXIT_OK


def cmd_certify(args) -> int:
    if args.grid < 2:
        raise ParameterError(f"grid must be >= 2 (got {args.grid})")
    if args.samples < 0:
        raise ParameterError(f"samples must be >= 0 (got {args.samples})")
    report = certify.certify_grid(args.grid, args.samples, args.seed, b0_shift=args.perturb_b0)
    print(f"tasks={report.n_tasks} samples={report.oracle_samples} seed={args.seed}")
    print(f"quantum  min_slack={report.quantum_min_slack:.3e} bound_err={report.quantum_bound_error:.3e} gap={report.quantum_gap:.3e}")
    print(f"classical min_slack={report.classical_min_slack:.3e} bound_err={report.classical_bound_error:.3e} gap={report.classical_gap:.3e}")
    if report.oracle_samples:
        print(f"oracle   max(objective - bound)={report.oracle_max_excess:.3e}")
    failures = report.failures()
    for line in failures:
        print(f"FAIL {line}")
    print("FAIL" if failures else "PASS")
    return EXIT_CERT if failures else EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARAM, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qfeedback", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fidelity", help="all scheme fidelities at one (p, theta)")
    f.add_argument("--p", type=float, required=True)
    f.add_argument("--theta", type=float, required=True)
    f.add_argument("--chi", type=float, help="measurement strength (default: optimal)")
    f.set_defaults(func=cmd_fidelity)

    s = sub.add_parser("sweep", help="CSV of fidelities over a (p, theta[, chi]) grid")
    s.add_argument("--grid", type=int, help="steps per axis (default 10)")
    s.add_argument("--p", type=float, help="pin p to one value")
    s.add_argument("--theta", type=float, help="pin theta to one value")
    s.add_argument("--p-range", type=float, nargs=2, default=(0.0, 0.5), metavar=("MIN", "MAX"))
    s.add_argument("--theta-range", type=float, nargs=2, default=(0.0, math.pi / 2), metavar=("MIN", "MAX"))
    s.add_argument("--p-steps", type=int)
    s.add_argument("--theta-steps", type=int)
    s.add_argument("--chi-steps", type=int, help="also sweep chi over [0, pi/2]")
    s.add_argument("--scheme", choices=sorted(SCHEME_COLUMNS), default="all")
    s.add_argument("--out", help="output path (default stdout)")
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("find-max-fdif", help="locate the maximum quantum advantage")
    m.add_argument("--grid", type=int, default=500)
    m.add_argument("--p-range", type=float, nargs=2, default=(0.0, 0.5), metavar=("MIN", "MAX"))
    m.add_argument("--theta-range", type=float, nargs=2, default=(0.0, math.pi / 2), metavar=("MIN", "MAX"))
    m.set_defaults(func=cmd_find_max_fdif)

    c = sub.add_parser("certify", help="verify both dual certificates and the random-channel oracle")
    c.add_argument("--grid", type=int, default=50)
    c.add_argument("--samples", type=int, default=1000)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--perturb-b0", type=float, default=0.0, help=argparse.SUPPRESS)
    c.set_defaults(func=cmd_certify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
