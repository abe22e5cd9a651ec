"""Command-line front end.

Subcommands: gen-matrix (write a random integer matrix file), run (one
coded multiplication job), sweep-stragglers (latency vs straggler count
for both ends of the threshold tradeoff), sweep-error (decode error vs
entry bound), plan-dump (exponent tables as CSV).

Exit codes: 0 success, 2 validation error, 3 decode failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from .encoding import SchemeParams, exponent_plan, plan_to_csv, recovery_threshold
from .errors import DecodeError, ValidationError
from .matrix import (
    conservative_bound,
    random_int_matrix,
    read_matrix,
    reference_product,
    write_matrix,
)
from .points import POINT_KINDS, generate_points
from .simulator import (
    CostModel,
    StragglerModel,
    SweepConfig,
    auto_base,
    run_job,
    sweep_rows_to_csv,
    sweep_stragglers,
)


@dataclass
class ExperimentConfig:
    """Resolved flags for one experiment."""

    m: int = 2
    n: int = 2
    p: int = 2
    p_prime: int = 1
    workers: int = 10
    s: int | None = None  # None: smallest power of two >= 2L
    point_kind: str | None = None  # None: integer for exact mode, real otherwise
    mode: str = "float"
    stragglers: int = 0
    trials: int = 1
    seed: int = 0
    size: int = 400
    bound: int = 50
    a_file: str | None = None
    b_file: str | None = None
    out: str | None = None
    cost: str = "synthetic"
    base_task_time: float = 1.0
    unsafe_s: bool = False

    def __post_init__(self):
        if self.mode not in ("float", "exact"):
            raise ValidationError(f"mode must be float or exact, not {self.mode!r}")
        if self.point_kind is None:
            self.point_kind = "integer" if self.mode == "exact" else "real"
        if self.point_kind not in POINT_KINDS:
            raise ValidationError(f"unknown point kind {self.point_kind!r}")
        if self.mode == "exact" and self.point_kind != "integer":
            raise ValidationError(
                "exact mode supports integer evaluation points only"
            )
        if (self.a_file is None) != (self.b_file is None):
            raise ValidationError("--a-file and --b-file must be given together")
        # Cheap structural checks before any matrix is generated or loaded.
        if self.p < 1 or self.p_prime < 1 or self.p % self.p_prime != 0:
            raise ValidationError(
                f"p_prime={self.p_prime} does not divide p={self.p}"
            )
        tau = recovery_threshold(self.m, self.n, self.p_prime)
        if self.workers < tau:
            raise ValidationError(
                f"{self.workers} workers cannot reach the threshold tau={tau}"
            )

    @property
    def scalar(self) -> str:
        if self.mode == "exact":
            return "exact"
        return "complex" if self.point_kind == "unit" else "float"

    def load_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        if self.a_file is not None:
            return read_matrix(self.a_file), read_matrix(self.b_file)
        A = random_int_matrix(self.size, self.size, self.bound, seed=self.seed)
        B = random_int_matrix(self.size, self.size, self.bound, seed=self.seed + 1)
        return A, B

    def scheme_params(self, A: np.ndarray, B: np.ndarray) -> SchemeParams:
        L = conservative_bound(A, B)
        s = self.s if self.s is not None else auto_base(L)
        return SchemeParams(self.m, self.n, self.p, self.p_prime, s, L,
                            unsafe_s=self.unsafe_s)

    def cost_model(self) -> CostModel:
        return CostModel(kind=self.cost, base_task_time=self.base_task_time)


def _parse_base(text: str) -> int | None:
    """An integer base, accepting 'auto' and the 2^k shorthand."""
    if text == "auto":
        return None
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    return int(text)


def _parse_int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t != ""]


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def _config_from(args) -> ExperimentConfig:
    field_names = set(ExperimentConfig.__dataclass_fields__)
    return ExperimentConfig(**{
        k.replace("-", "_"): v for k, v in vars(args).items()
        if k in field_names and v is not None
    })


def _add_scheme_flags(sub, with_p_prime=True):
    sub.add_argument("--m", type=int, default=2, help="column blocks of A")
    sub.add_argument("--n", type=int, default=2, help="column blocks of B")
    sub.add_argument("--p", type=int, default=2, help="row blocks of A and B")
    if with_p_prime:
        sub.add_argument("--p-prime", dest="p_prime", type=int, default=1,
                         help="threshold/precision split (must divide p)")


def _add_common_flags(sub):
    sub.add_argument("--workers", type=int, default=10, help="pool size K")
    sub.add_argument("--s", type=_parse_base, default="auto",
                     help="digit base; integer, 2^k, or 'auto' (default)")
    sub.add_argument("--points", dest="point_kind", choices=POINT_KINDS,
                     default=None, help="evaluation point family")
    sub.add_argument("--mode", choices=("float", "exact"), default="float")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--size", type=int, default=400,
                     help="generated square matrix size")
    sub.add_argument("--bound", type=int, default=50,
                     help="generated entry bound (entries in 0..bound)")
    sub.add_argument("--a-file", dest="a_file", help="matrix file for A")
    sub.add_argument("--b-file", dest="b_file", help="matrix file for B")
    sub.add_argument("--out", help="output file (default: stdout)")
    sub.add_argument("--cost", choices=("synthetic", "measured"),
                     default="synthetic")
    sub.add_argument("--base-task-time", dest="base_task_time", type=float,
                     default=1.0, help="synthetic per-task duration")
    sub.add_argument("--unsafe-s", dest="unsafe_s", action="store_true",
                     help="downgrade the s >= 2L check to a warning")


def cmd_gen_matrix(args) -> int:
    M = random_int_matrix(args.rows, args.cols, args.bound,
                          signed=args.signed, seed=args.seed)
    write_matrix(M, args.out)
    return 0


def cmd_run(args) -> int:
    cfg = _config_from(args)
    A, B = cfg.load_matrices()
    params = cfg.scheme_params(A, B)
    points = generate_points(cfg.point_kind, cfg.workers)
    straggler = StragglerModel(mode="compute_twice" if cfg.stragglers else "none",
                               count=cfg.stragglers, seed=cfg.seed)
    reference = reference_product(A, B)
    if not np.any(reference):
        reference = None
    subset = _parse_int_list(args.use_workers) if args.use_workers else None
    report, timing = run_job(A, B, params, points, straggler, cfg.cost_model(),
                             cfg.scalar, reference=reference, subset=subset)
    rel = "n/a" if report.rel_error is None else repr(report.rel_error)
    print(f"tau={params.tau} latency={timing.computation_latency!r} "
          f"decode_time={timing.decode_duration!r} rel_error={rel} "
          f"digit_margin={report.digit_margin!r}")
    if cfg.out:
        row = {
            "scheme": f"p{params.p_prime}", "m": cfg.m, "n": cfg.n, "p": cfg.p,
            "p_prime": params.p_prime, "K": cfg.workers, "tau": params.tau,
            "S": cfg.stragglers, "trial": 0, "seed": cfg.seed,
            "latency_ms": timing.computation_latency * 1000.0,
            "decode_ms": timing.decode_duration * 1000.0,
            "rel_error": report.rel_error,
            "condition_estimate": report.condition_estimate,
        }
        _write_text(cfg.out, sweep_rows_to_csv([row]))
    return 0


def cmd_sweep_stragglers(args) -> int:
    cfg = _config_from(args)
    A, B = cfg.load_matrices()
    sweep = SweepConfig(
        A=A, B=B, m=cfg.m, n=cfg.n, p=cfg.p, workers=cfg.workers,
        point_kind=cfg.point_kind, scalar=cfg.scalar, s=cfg.s,
        cost=cfg.cost_model(), trials=cfg.trials, seed=cfg.seed,
        straggler_counts=(_parse_int_list(args.straggler_counts)
                          if args.straggler_counts else None),
    )
    _write_text(cfg.out, sweep_rows_to_csv(sweep_stragglers(sweep)))
    return 0


def cmd_sweep_error(args) -> int:
    cfg = _config_from(args)
    bounds = _parse_int_list(args.bounds)
    if not bounds:
        raise ValidationError("--bounds must list at least one entry bound")
    s_values = [_parse_base(t) for t in args.s_values.split(",")] \
        if args.s_values else None
    if s_values is not None and len(s_values) != len(bounds):
        raise ValidationError("--s-values must match --bounds in length")
    points = generate_points(cfg.point_kind, cfg.workers)
    lines = ["bound,s,rel_error"]
    for bi, bound in enumerate(bounds):
        for trial in range(cfg.trials):
            seed = cfg.seed + 1009 * bi + trial
            A = random_int_matrix(cfg.size, cfg.size, bound, seed=seed)
            B = random_int_matrix(cfg.size, cfg.size, bound, seed=seed + 500_000)
            L = conservative_bound(A, B)
            s = s_values[bi] if s_values and s_values[bi] is not None else auto_base(L)
            params = SchemeParams(cfg.m, cfg.n, cfg.p, cfg.p_prime, s, L,
                                  unsafe_s=cfg.unsafe_s)
            reference = reference_product(A, B)
            ref = reference if np.any(reference) else None
            report, _ = run_job(A, B, params, points, StragglerModel(),
                                cfg.cost_model(), cfg.scalar,
                                reference=ref, strict=False)
            if report.rel_error is not None:
                cell = repr(report.rel_error)
            else:
                cell = "exact" if np.array_equal(report.c_hat, reference) else "mismatch"
            lines.append(f"{bound},{s},{cell}")
    _write_text(cfg.out, "\n".join(lines) + "\n")
    return 0


def cmd_plan_dump(args) -> int:
    params = SchemeParams(args.m, args.n, args.p, args.p_prime, s=2, L=1)
    _write_text(args.out, plan_to_csv(exponent_plan(params)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="codedmm",
        description="Coded distributed matrix multiplication toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-matrix", help="write a random integer matrix file")
    gen.add_argument("--rows", type=int, required=True)
    gen.add_argument("--cols", type=int, required=True)
    gen.add_argument("--bound", type=int, required=True,
                     help="entries drawn from 0..bound (or +/-bound with --signed)")
    gen.add_argument("--signed", action="store_true")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen_matrix)

    run = sub.add_parser("run", help="one coded multiplication job")
    _add_scheme_flags(run)
    _add_common_flags(run)
    run.add_argument("--stragglers", type=int, default=0,
                     help="workers that compute twice")
    run.add_argument("--use-workers", dest="use_workers",
                     help="decode from these worker ids (comma list)")
    run.set_defaults(func=cmd_run)

    ss = sub.add_parser("sweep-stragglers",
                        help="latency vs straggler count, p'=1 and p'=p schemes")
    _add_scheme_flags(ss, with_p_prime=False)
    _add_common_flags(ss)
    ss.add_argument("--trials", type=int, default=1)
    ss.add_argument("--straggler-counts", dest="straggler_counts",
                    help="comma list of S values (default 0..K-1)")
    ss.set_defaults(func=cmd_sweep_stragglers)

    se = sub.add_parser("sweep-error", help="decode error vs entry bound")
    _add_scheme_flags(se)
    _add_common_flags(se)
    se.add_argument("--trials", type=int, default=1)
    se.add_argument("--bounds", required=True, help="comma list of entry bounds")
    se.add_argument("--s-values", dest="s_values",
                    help="per-bound base override (comma list; 2^k allowed)")
    se.set_defaults(func=cmd_sweep_error)

    pd = sub.add_parser("plan-dump", help="print the exponent tables as CSV")
    _add_scheme_flags(pd)
    pd.add_argument("--out")
    pd.set_defaults(func=cmd_plan_dump)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DecodeError as exc:
        print(f"decode failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
