"""Product reconstruction from worker results.

Decoding runs in two stages.  A Vandermonde solve on any tau evaluation
points recovers the stacked coefficients X_0..X_{tau-1} of the product
polynomial; one factorization is shared by every matrix entry.  Each
useful coefficient then superposes the wanted block C_iu (at s^0) with
interference at other powers of s: rounding kills the negative powers
(their total stays below 1/2 when s >= 2L) and a signed mod-s reduction
kills the positive ones.  The exact backend works on the integer-shifted
representation instead, pulling the balanced base-s digit at position
s_span - 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Complex, Integral, Real

import numpy as np

from .encoding import ExponentPlan, SchemeParams
from .errors import (
    BoundViolationError,
    DecodeError,
    DimensionError,
    InsufficientResultsError,
    PrecisionLossWarning,
    SingularityError,
    ValidationError,
)
from .matrix import assemble, frobenius_rel_error, int_matrix
from .points import vandermonde_condition


@dataclass(frozen=True)
class WorkerResult:
    """One worker's evaluated share product and its timing."""

    worker_id: int
    point: object
    product: np.ndarray
    compute_duration: float = 0.0


@dataclass(frozen=True)
class CoefficientStack:
    """The interpolated coefficients X_0..X_{tau-1}, one matrix each."""

    coeffs: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.coeffs)


@dataclass
class DecodeReport:
    """Reconstructed product plus decode diagnostics.

    digit_margin is the smallest distance of any pre-round fractional
    part from 1/2 (0.5 means perfectly integral); failures lists
    (block_row, block_col, row, col, value) for entries whose extracted
    digit reached the bound.
    """

    c_hat: np.ndarray
    used_workers: tuple[int, ...]
    rel_error: float | None
    condition_estimate: float
    digit_margin: float
    imag_residual: float = 0.0
    failures: list[tuple[int, int, int, int, int]] = field(default_factory=list)

    def summary(self) -> str:
        rel = "n/a" if self.rel_error is None else repr(self.rel_error)
        ids = "|".join(str(w) for w in self.used_workers)
        return (f"used_workers={ids} condition_estimate={self.condition_estimate!r} "
                f"digit_margin={self.digit_margin!r} rel_error={rel}")

    def failures_csv(self) -> str:
        lines = ["block_row,block_col,row,col,value"]
        lines += [f"{i},{u},{r},{c},{v}" for (i, u, r, c, v) in self.failures]
        return "\n".join(lines) + "\n"


def modulo_power_of_two(x: int, s: int) -> int:
    """x mod s in [0, s), by bit masking when s is a power of two
    (otherwise plain modulo; not an error)."""
    if s < 1:
        raise ValidationError("modulus must be positive")
    x = int(x)
    if s & (s - 1) == 0:
        return x & (s - 1)
    return x % s


def _balanced_digit(x: int, s: int, position: int) -> int:
    """Digit at the given s-position of the balanced base-s expansion
    (digits in (-s/2, s/2], unique when all digits stay below s/2)."""
    digit = 0
    for _ in range(position + 1):
        r = x % s
        if 2 * r > s:
            r -= s
        digit = r
        x = (x - r) // s
    return digit


def _extract(x, s: int, q: int):
    """Pull the useful digit out of one coefficient.

    Returns (value, margin, imag).  Integers take the exact shifted-digit
    path; floats are rounded, reduced mod s, and sign-corrected.  A None
    value marks a non-finite input.
    """
    if isinstance(x, Integral):
        return _balanced_digit(int(x), s, q - 1), 0.5, 0.0
    if isinstance(x, Fraction):
        raise DecodeError(
            "exact-mode coefficient is not an integer; the evaluation points "
            "or worker products were not integral"
        )
    xc = complex(x)
    imag, xr = abs(xc.imag), xc.real
    if not math.isfinite(xr):
        return None, 0.0, imag
    rounded = int(np.rint(xr))
    margin = abs((xr - math.floor(xr)) - 0.5)
    r = modulo_power_of_two(rounded, s)
    return (r if 2 * r <= s else r - s), margin, imag


def extract_digit(x, s: int, q: int = 1, bound: int | None = None,
                  guard: float = 1e-3):
    """Recover the s^0 digit of x = sum of T_d s^d, d in -(q-1)..q-1.

    Float inputs follow round / mod-s / sign-rule; integer inputs are
    treated as the exact pipeline's shifted representation (x * s^(q-1))
    and yield the balanced digit at position q - 1.  Values within
    ``guard`` of a half-integer trigger a PrecisionLossWarning; digits
    reaching ``bound`` raise BoundViolationError.
    """
    value, margin, _ = _extract(x, s, q)
    if value is None:
        raise DecodeError(f"cannot extract a digit from non-finite value {x!r}")
    if margin < guard:
        warnings.warn(
            f"pre-round value {x!r} lies within {guard} of a half-integer",
            PrecisionLossWarning,
        )
    if bound is not None and abs(value) >= bound:
        raise BoundViolationError(f"extracted digit {value} reaches the bound L={bound}")
    return value


def _invert_exact(V: list[list[Fraction]]):
    """Gauss-Jordan inverse over Fractions."""
    n = len(V)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(V)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise SingularityError("interpolation matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        scale = aug[col][col]
        aug[col] = [x / scale for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _is_complex_scalar(z) -> bool:
    return isinstance(z, Complex) and not isinstance(z, Real)


def _result_mode(results) -> str:
    products = [np.asarray(r.product) for r in results]
    if any(np.iscomplexobj(p) for p in products) or \
            any(_is_complex_scalar(r.point) for r in results):
        return "complex"
    exact = all(isinstance(r.point, Integral) for r in results) and \
        all(p.dtype == object or np.issubdtype(p.dtype, np.integer)
            for p in products)
    return "exact" if exact else "float"


def interpolate(results, tau: int) -> CoefficientStack:
    """Solve the tau x tau Vandermonde system V X = Y for the coefficient
    stack, sharing one factorization across all matrix entries.  Exact
    when points and products are integers."""
    results = list(results)
    if len(results) < tau:
        raise InsufficientResultsError(
            f"got {len(results)} results, threshold tau={tau}"
        )
    if len(results) > tau:
        raise ValidationError(f"expected exactly tau={tau} results, got {len(results)}")
    pts = [r.point for r in results]
    if len(set(pts)) != tau:
        raise SingularityError("duplicate evaluation point")
    shapes = {np.asarray(r.product).shape for r in results}
    if len(shapes) != 1:
        raise DimensionError(f"worker products disagree in shape: {sorted(shapes)}")
    (rb, tb), = shapes

    mode = _result_mode(results)
    if mode == "exact":
        V = [[Fraction(int(z)) ** j for j in range(tau)] for z in pts]
        Vinv = _invert_exact(V)
        prods = [np.asarray(r.product).astype(object) for r in results]
        norm = np.vectorize(
            lambda f: int(f) if isinstance(f, Fraction) and f.denominator == 1 else f,
            otypes=[object],
        )
        coeffs = []
        for k in range(tau):
            acc = np.full((rb, tb), Fraction(0), dtype=object)
            for j in range(tau):
                if Vinv[k][j] != 0:
                    acc = acc + prods[j] * Vinv[k][j]
            coeffs.append(norm(acc))
        return CoefficientStack(tuple(coeffs))

    dtype = np.complex128 if mode == "complex" else np.float64
    V = np.vander(np.asarray(pts, dtype=dtype), increasing=True)
    Y = np.stack([np.asarray(r.product, dtype=dtype) for r in results])
    try:
        X = np.linalg.solve(V, Y.reshape(tau, rb * tb))
    except np.linalg.LinAlgError as exc:
        raise SingularityError(str(exc)) from exc
    return CoefficientStack(tuple(X[k].reshape(rb, tb) for k in range(tau)))


def decode(results, params: SchemeParams, plan: ExponentPlan, *,
           reference: np.ndarray | None = None, subset=None,
           strict: bool = True, guard: float = 1e-3) -> DecodeReport:
    """Recover C = A^T B from at least tau worker results.

    Selects tau results (earliest completion by default, or the given
    worker-id subset), interpolates, and extracts the useful digit of
    each output entry.  With strict=False, bound violations and
    non-finite coefficients are recorded in the report's failures list
    instead of raising, which keeps overflowed sweeps comparable.
    """
    results = list(results)
    tau = params.tau
    if subset is not None:
        by_id = {r.worker_id: r for r in results}
        subset = list(subset)
        missing = [w for w in subset if w not in by_id]
        if missing:
            raise ValidationError(f"unknown worker ids in subset: {missing}")
        if len(subset) < tau:
            raise InsufficientResultsError(
                f"subset has {len(subset)} results, threshold tau={tau}"
            )
        if len(subset) > tau:
            raise ValidationError(
                f"subset names {len(subset)} workers; exactly tau={tau} decode"
            )
        chosen = [by_id[w] for w in subset]
    else:
        if len(results) < tau:
            raise InsufficientResultsError(
                f"got {len(results)} results, threshold tau={tau}"
            )
        chosen = sorted(results, key=lambda r: (r.compute_duration, r.worker_id))[:tau]

    stack = interpolate(chosen, tau)
    s, q = params.s, params.s_span
    min_margin, max_imag = 0.5, 0.0
    failures: list[tuple[int, int, int, int, int]] = []
    blocks: list[list[np.ndarray | None]] = [[None] * params.n for _ in range(params.m)]
    for (i, u), deg in sorted(plan.useful_index.items()):
        X = stack.coeffs[deg]
        rows = []
        for r in range(X.shape[0]):
            row = []
            for c in range(X.shape[1]):
                value, margin, imag = _extract(X[r, c], s, q)
                min_margin = min(min_margin, margin)
                max_imag = max(max_imag, imag)
                if value is None:
                    if strict:
                        raise DecodeError(
                            f"non-finite coefficient at output block ({i},{u}) "
                            f"entry ({r},{c})"
                        )
                    failures.append((i, u, r, c, 0))
                    value = 0
                elif abs(value) >= params.L:
                    if strict:
                        raise BoundViolationError(
                            f"output block ({i},{u}) entry ({r},{c}): extracted "
                            f"digit {value} reaches the bound L={params.L}"
                        )
                    failures.append((i, u, r, c, value))
                row.append(value)
            rows.append(row)
        blocks[i][u] = int_matrix(rows)
    c_hat = assemble(blocks)

    if min_margin < guard:
        warnings.warn(
            f"smallest rounding margin {min_margin!r} is inside the guard band {guard}",
            PrecisionLossWarning,
        )
    rel = None if reference is None else frobenius_rel_error(reference, c_hat)
    return DecodeReport(
        c_hat=c_hat,
        used_workers=tuple(r.worker_id for r in chosen),
        rel_error=rel,
        condition_estimate=vandermonde_condition([r.point for r in chosen]),
        digit_margin=min_margin,
        imag_residual=max_imag,
        failures=failures,
    )
