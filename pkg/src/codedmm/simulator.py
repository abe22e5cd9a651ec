"""Master/worker pool simulation with straggler injection.

Workers run as independent concurrent tasks; the master collects
(worker_id, product, duration) messages and decodes once the threshold
count has arrived, ignoring anything that lands later.  Under the
synthetic cost model every duration comes from the model (stragglers take
exactly twice the base task time), so runs are bit-reproducible from the
seed regardless of physical thread scheduling; under the measured model
durations are wall-clock and stragglers literally compute twice.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field

import numpy as np

from .decoding import DecodeReport, WorkerResult, decode
from .encoding import SchemeParams, encode_all, exponent_plan
from .errors import DimensionError, JobFailureError, ValidationError
from .matrix import conservative_bound, reference_product
from .points import generate_points

SWEEP_CSV_HEADER = ("scheme,m,n,p,p_prime,K,tau,S,trial,seed,"
                    "latency_ms,decode_ms,rel_error,condition_estimate")


@dataclass(frozen=True)
class StragglerModel:
    """How stragglers are injected into a worker pool.

    compute_twice doubles the work of ``count`` distinct workers chosen
    uniformly from the pool by ``seed``; random_delay adds an independent
    exponential delay with mean ``delay_scale`` to every worker.
    """

    mode: str = "none"  # none | compute_twice | random_delay
    count: int = 0
    delay_scale: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("none", "compute_twice", "random_delay"):
            raise ValidationError(f"unknown straggler mode {self.mode!r}")
        if self.mode == "compute_twice" and self.count < 0:
            raise ValidationError("straggler count must be non-negative")

    def pick(self, num_workers: int) -> frozenset[int]:
        if self.mode != "compute_twice" or self.count == 0:
            return frozenset()
        if self.count > num_workers:
            raise ValidationError(
                f"cannot double {self.count} of {num_workers} workers"
            )
        rng = random.Random(self.seed)
        return frozenset(rng.sample(range(num_workers), self.count))

    def delays(self, num_workers: int) -> list[float]:
        if self.mode != "random_delay" or self.delay_scale <= 0:
            return [0.0] * num_workers
        rng = random.Random(self.seed)
        return [rng.expovariate(1.0 / self.delay_scale) for _ in range(num_workers)]


@dataclass(frozen=True)
class CostModel:
    """Worker timing source: model-assigned ("synthetic", deterministic)
    or wall-clock ("measured")."""

    kind: str = "synthetic"
    base_task_time: float = 1.0

    def __post_init__(self):
        if self.kind not in ("synthetic", "measured"):
            raise ValidationError(f"unknown cost model {self.kind!r}")
        if self.base_task_time <= 0:
            raise ValidationError("base task time must be positive")


@dataclass
class LatencyReport:
    """Timing outcome of one job."""

    computation_latency: float
    decode_duration: float
    per_worker_durations: dict[int, float]
    straggler_ids: frozenset[int]
    tau_used: int


def worker_task(share_a: np.ndarray, share_b: np.ndarray) -> np.ndarray:
    """One worker's job: share_a^T @ share_b."""
    share_a, share_b = np.asarray(share_a), np.asarray(share_b)
    if share_a.ndim != 2 or share_b.ndim != 2:
        raise DimensionError("shares must be 2-D matrices")
    if share_a.shape[0] != share_b.shape[0]:
        raise DimensionError(
            f"inner dimensions disagree: share_a has {share_a.shape[0]} rows, "
            f"share_b has {share_b.shape[0]}"
        )
    return share_a.T @ share_b


def _run_worker(worker_id: int, share_a, share_b, doubled: bool, measured: bool,
                delay: float):
    start = time.perf_counter()
    if measured and delay > 0:
        time.sleep(delay)
    product = worker_task(share_a, share_b)
    if doubled and measured:
        product = worker_task(share_a, share_b)
    return worker_id, product, time.perf_counter() - start


def run_job(A: np.ndarray, B: np.ndarray, params: SchemeParams, points,
            straggler: StragglerModel = StragglerModel(),
            cost: CostModel = CostModel(), scalar: str = "auto", *,
            reference: np.ndarray | None = None, subset=None,
            strict: bool = True) -> tuple[DecodeReport, LatencyReport]:
    """Encode, dispatch K concurrent worker tasks, decode from the first
    tau completions, and report both result quality and timing."""
    points = list(points)
    K = len(points)
    pairs = encode_all(A, B, params, points, scalar)
    plan = exponent_plan(params)
    doubled = straggler.pick(K)
    delays = straggler.delays(K)
    measured = cost.kind == "measured"
    tau = params.tau

    arrived: list[tuple[float, int, np.ndarray, float]] = []
    failed: list[int] = []
    dispatch = time.perf_counter()
    with ThreadPoolExecutor(max_workers=K) as pool:
        owner = {
            pool.submit(_run_worker, wid, sa, sb, wid in doubled, measured,
                        delays[wid]): wid
            for wid, (sa, sb) in enumerate(pairs)
        }
        pending = set(owner)
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                try:
                    wid, product, dur = fut.result()
                except DimensionError:
                    raise
                except Exception:  # noqa: BLE001 - a worker crash is an erasure
                    failed.append(owner[fut])
                    continue
                arrived.append((time.perf_counter() - dispatch, wid, product, dur))
            # The master stops listening once tau results are in; later
            # arrivals are ignored.  Synthetic runs drain the pool since
            # simulated order need not match physical order.
            if measured and len(arrived) >= tau:
                break

    if len(arrived) < tau:
        raise JobFailureError(
            f"only {len(arrived)} of {K} workers completed, threshold tau={tau}; "
            f"failed workers: {sorted(failed)}"
        )

    if measured:
        durations = {wid: dur for _, wid, _, dur in arrived}
        order = sorted(arrived, key=lambda rec: rec[0])
        latency = order[tau - 1][0]
    else:
        durations = {
            wid: cost.base_task_time * (2.0 if wid in doubled else 1.0) + delays[wid]
            for _, wid, _, _ in arrived
        }
        order = sorted(arrived, key=lambda rec: (durations[rec[1]], rec[1]))
        latency = sorted(durations.values())[tau - 1]

    results = [
        WorkerResult(wid, points[wid], product, durations[wid])
        for _, wid, product, _ in order
    ]
    decode_start = time.perf_counter()
    report = decode(results, params, plan, reference=reference, subset=subset,
                    strict=strict)
    decode_duration = (time.perf_counter() - decode_start) if measured else 0.0
    return report, LatencyReport(
        computation_latency=latency,
        decode_duration=decode_duration,
        per_worker_durations=durations,
        straggler_ids=doubled,
        tau_used=tau,
    )


@dataclass
class SweepConfig:
    """Inputs for the straggler sweep: one job per (scheme, S, trial)
    with the p'=1 and p'=p schemes sharing points, matrices, and
    straggler choices."""

    A: np.ndarray
    B: np.ndarray
    m: int = 2
    n: int = 2
    p: int = 2
    workers: int = 10
    point_kind: str = "real"
    scalar: str = "float"
    s: int | None = None  # None: smallest power of two >= 2L
    cost: CostModel = field(default_factory=CostModel)
    trials: int = 1
    seed: int = 0
    straggler_counts: list[int] | None = None


def auto_base(L: int) -> int:
    """Smallest power of two >= 2L (power of two keeps mod-s a bit mask)."""
    if L < 1:
        raise ValidationError("L must be positive")
    return 1 << (2 * L - 1).bit_length()


def sweep_stragglers(cfg: SweepConfig) -> list[dict]:
    """Run the straggler sweep for both ends of the threshold tradeoff.

    Returns one row dict per (scheme, straggler count, trial), in the
    SWEEP_CSV_HEADER column order.  Evaluation points, matrices, and the
    doubled-worker choices are identical across the two schemes.
    """
    L = conservative_bound(cfg.A, cfg.B)
    s = cfg.s if cfg.s is not None else auto_base(L)
    p_primes = [1] if cfg.p == 1 else [1, cfg.p]
    schemes = []
    for pp in p_primes:
        params = SchemeParams(cfg.m, cfg.n, cfg.p, pp, s, L)
        if cfg.workers < params.tau:
            raise ValidationError(
                f"{cfg.workers} workers cannot reach tau={params.tau} (p'={pp})"
            )
        schemes.append((f"p{pp}", params))

    kind = "integer" if cfg.scalar == "exact" else cfg.point_kind
    points = generate_points(kind, cfg.workers)
    reference = reference_product(cfg.A, cfg.B)
    if not np.any(reference):
        reference = None  # relative error undefined against a zero product
    counts = cfg.straggler_counts if cfg.straggler_counts is not None \
        else list(range(cfg.workers))

    rows = []
    for label, params in schemes:
        for S in counts:
            for trial in range(cfg.trials):
                job_seed = cfg.seed + 10_000 * S + trial
                straggler = StragglerModel(mode="compute_twice", count=S,
                                           seed=job_seed)
                report, timing = run_job(
                    cfg.A, cfg.B, params, points, straggler, cfg.cost,
                    cfg.scalar, reference=reference, strict=False,
                )
                rows.append({
                    "scheme": label,
                    "m": cfg.m, "n": cfg.n, "p": cfg.p,
                    "p_prime": params.p_prime,
                    "K": cfg.workers, "tau": params.tau,
                    "S": S, "trial": trial, "seed": job_seed,
                    "latency_ms": timing.computation_latency * 1000.0,
                    "decode_ms": timing.decode_duration * 1000.0,
                    "rel_error": report.rel_error,
                    "condition_estimate": report.condition_estimate,
                })
    return rows


def _csv_cell(v) -> str:
    if v is None:
        return "n/a"
    return repr(v) if isinstance(v, float) else str(v)


def sweep_rows_to_csv(rows: list[dict]) -> str:
    """Render sweep rows in the fixed column order."""
    lines = [SWEEP_CSV_HEADER]
    for row in rows:
        lines.append(",".join(_csv_cell(row[c]) for c in SWEEP_CSV_HEADER.split(",")))
    return "\n".join(lines) + "\n"
