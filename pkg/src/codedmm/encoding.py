"""Polynomial share construction for coded A^T B.

A is cut into a p x m block grid and B into p x n; each grid is folded
into a bivariate polynomial in s (an integer digit base) and z (the
interpolation variable), and every worker receives one evaluation of each
polynomial.  The products of the two polynomials superpose the wanted
block products C_iu with interference terms, but at distinct powers of s,
so the superposition can be undone digit by digit after interpolation.

The split parameter p' (a divisor of p) tunes the tradeoff: the scheme
needs tau = m*n*p' + p' - 1 finished workers, and with s = 2L every
recovered coefficient stays below (2L)^(p/p')/2 in magnitude.  p' = 1
gives the minimum threshold m*n; p' = p stacks nothing in s and matches
the classical threshold p*m*n + p - 1.

Sign convention: A-blocks carry the non-negative s-powers and B-blocks
the non-positive ones.  (The mirrored assignment, s -> 1/s, is an
equivalent code with identical bounds.)
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from numbers import Complex, Integral, Rational, Real

import numpy as np

from .errors import ValidationError
from .matrix import PartitionedMatrix, partition

SCALAR_KINDS = ("float", "complex", "exact")


def recovery_threshold(m: int, n: int, p_prime: int) -> int:
    """Workers needed to decode: m*n*p_prime + p_prime - 1."""
    if min(m, n, p_prime) < 1:
        raise ValidationError("m, n and p_prime must be at least 1")
    return m * n * p_prime + p_prime - 1


@dataclass(frozen=True)
class SchemeParams:
    """Code-construction parameters (m, n, p, p', s, L).

    s must be at least twice the entry-product bound L or digit
    extraction is ambiguous; set unsafe_s=True to downgrade that check
    to a warning.
    """

    m: int
    n: int
    p: int
    p_prime: int
    s: int
    L: int
    unsafe_s: bool = False

    def __post_init__(self):
        for name in ("m", "n", "p", "p_prime"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be at least 1")
        if self.p % self.p_prime != 0:
            raise ValidationError(f"p_prime={self.p_prime} does not divide p={self.p}")
        if self.L < 1:
            raise ValidationError("L must be a positive integer")
        if self.s < 2:
            raise ValidationError("s must be an integer base of at least 2")
        if self.s < 2 * self.L:
            msg = f"s={self.s} is below 2L={2 * self.L}; digit extraction may be wrong"
            if self.unsafe_s:
                warnings.warn(msg)
            else:
                raise ValidationError(msg)

    @property
    def tau(self) -> int:
        return recovery_threshold(self.m, self.n, self.p_prime)

    @property
    def s_span(self) -> int:
        """Row-blocks folded per z-slot: the product carries s-powers
        -(s_span-1) .. s_span-1, with the useful digit at s^0."""
        return self.p // self.p_prime


@dataclass(frozen=True)
class ExponentPlan:
    """Per-block (z, s) exponent tables and the useful-coefficient map.

    a_exponents / b_exponents map (block_row, block_col) to
    (z_exp, s_exp); useful_index maps an output block (i, u) to the
    z-degree whose s^0 digit is C_iu.
    """

    a_exponents: dict[tuple[int, int], tuple[int, int]]
    b_exponents: dict[tuple[int, int], tuple[int, int]]
    useful_index: dict[tuple[int, int], int]
    total_z_degree: int


def exponent_plan(params: SchemeParams) -> ExponentPlan:
    """Build the exponent tables for the (m, n, p, p') scheme.

    A-block rows are consumed q = p/p' at a time: group j of block-rows
    k + q*j lands at z^(j + p'*i) with s-digit k.  B mirrors this with
    reversed group order and negated s-digits, so that same-block-row
    products meet at s^0 on the z-degrees listed in useful_index.
    """
    m, n, pp, q = params.m, params.n, params.p_prime, params.s_span

    a_exp: dict[tuple[int, int], tuple[int, int]] = {}
    for i in range(m):
        for j in range(pp):
            for k in range(q):
                a_exp[(k + q * j, i)] = (j + pp * i, k)

    b_exp: dict[tuple[int, int], tuple[int, int]] = {}
    for u in range(n):
        for v in range(pp):
            for w in range(q):
                b_exp[(w + q * v, u)] = (m * pp * u + (pp - 1 - v), -w)

    useful = {(i, u): m * pp * u + pp * i + pp - 1
              for i in range(m) for u in range(n)}
    plan = ExponentPlan(a_exp, b_exp, useful, m * n * pp + pp - 2)
    _check_plan(plan, params)
    return plan


def _check_plan(plan: ExponentPlan, params: SchemeParams) -> None:
    """Assert the tables against their closed forms and the separation
    property: at s-degree 0, only same-block-row pairs land on useful
    z-degrees, and they land exactly on their own output block's degree."""
    m, n, p, pp, q = params.m, params.n, params.p, params.p_prime, params.s_span
    for (a, i), (z_e, s_e) in plan.a_exponents.items():
        assert z_e == a // q + pp * i and s_e == a % q
    for (b, u), (z_e, s_e) in plan.b_exponents.items():
        assert z_e == m * pp * u + (pp - 1 - b // q) and s_e == -(b % q)

    degree_of = {deg: iu for iu, deg in plan.useful_index.items()}
    assert len(degree_of) == m * n
    z_degrees = set()
    for (a, i), (za, sa) in plan.a_exponents.items():
        for (b, u), (zb, sb) in plan.b_exponents.items():
            z_degrees.add(za + zb)
            if sa + sb != 0:
                continue
            hit = degree_of.get(za + zb)
            if a == b:
                assert hit == (i, u)
            else:
                # Distinctness: an interference pair at s^0 never reaches
                # a useful degree (its z-offset j - v is a non-multiple
                # of p' with |j - v| < p').
                assert hit is None
    assert z_degrees == set(range(plan.total_z_degree + 1))


def _infer_scalar(z) -> str:
    if isinstance(z, (Integral, Rational)) and not isinstance(z, bool):
        return "exact"
    if isinstance(z, Complex) and not isinstance(z, Real):
        return "complex"
    if isinstance(z, Real):
        return "float"
    raise ValidationError(f"cannot infer scalar kind from point {z!r}")


def _coefficient(s: int, s_exp: int, z, z_exp: int, scalar: str):
    if scalar == "exact":
        base = s ** s_exp if s_exp >= 0 else Fraction(1, s ** -s_exp)
        c = base * z ** z_exp
        return int(c) if isinstance(c, Fraction) and c.denominator == 1 else c
    zc = complex(z) if scalar == "complex" else float(z)
    return float(s) ** s_exp * zc ** z_exp


def encode_share(part: PartitionedMatrix, plan: ExponentPlan, side: str,
                 s: int, z, scalar: str = "auto", s_exp_offset: int = 0) -> np.ndarray:
    """Evaluate one encoding polynomial: sum of block * s^s_exp * z^z_exp.

    s_exp_offset shifts every s-exponent of this side; the exact-integer
    pipeline uses it to clear the negative powers on the B side (shift by
    s_span - 1), keeping all arithmetic in plain integers.
    """
    if side not in ("A", "B"):
        raise ValidationError(f"side must be 'A' or 'B', not {side!r}")
    table = plan.a_exponents if side == "A" else plan.b_exponents
    grid = {(i, j) for i in range(part.row_blocks) for j in range(part.col_blocks)}
    if grid != set(table):
        raise ValidationError(
            f"{part.row_blocks}x{part.col_blocks} block grid does not match the "
            f"plan's {side} side"
        )
    if scalar == "auto":
        scalar = _infer_scalar(z)
    elif scalar not in SCALAR_KINDS:
        raise ValidationError(f"unknown scalar kind {scalar!r}")

    dtype = {"float": np.float64, "complex": np.complex128, "exact": object}[scalar]
    if scalar == "exact":
        acc = np.full((part.block_rows, part.block_cols), 0, dtype=object)
    else:
        acc = np.zeros((part.block_rows, part.block_cols), dtype=dtype)
    for (bi, bj), (z_exp, s_exp) in sorted(table.items()):
        coeff = _coefficient(s, s_exp + s_exp_offset, z, z_exp, scalar)
        acc = acc + part.block(bi, bj).astype(dtype) * coeff
    return acc


def encode_all(A: np.ndarray, B: np.ndarray, params: SchemeParams,
               points, scalar: str = "auto") -> list[tuple[np.ndarray, np.ndarray]]:
    """Encode one share pair per evaluation point.

    Needs at least tau distinct points.  In exact mode the B-side
    s-exponents are shifted up by s_span - 1 so shares stay integral; the
    decoder extracts the useful digit at the shifted position.
    """
    points = list(points)
    if len(points) < params.tau:
        raise ValidationError(
            f"insufficient workers: {len(points)} points for threshold tau={params.tau}"
        )
    if len(set(points)) != len(points):
        raise ValidationError("duplicate evaluation point")
    A, B = np.asarray(A), np.asarray(B)
    if A.ndim != 2 or B.ndim != 2 or A.shape[0] != B.shape[0]:
        raise ValidationError(
            f"A and B must be 2-D with equal row counts, got {A.shape} and {B.shape}"
        )
    if scalar == "auto":
        scalar = _infer_scalar(points[0])
    part_a = partition(A, params.p, params.m)
    part_b = partition(B, params.p, params.n)
    plan = exponent_plan(params)
    b_shift = params.s_span - 1 if scalar == "exact" else 0
    return [
        (encode_share(part_a, plan, "A", params.s, z, scalar),
         encode_share(part_b, plan, "B", params.s, z, scalar, s_exp_offset=b_shift))
        for z in points
    ]


def plan_to_csv(plan: ExponentPlan) -> str:
    """Exponent tables as CSV; side C rows give each output block's
    useful z-degree (s_exp 0 by construction)."""
    lines = ["side,block_row,block_col,z_exp,s_exp"]
    for side, table in (("A", plan.a_exponents), ("B", plan.b_exponents)):
        for (bi, bj), (z_e, s_e) in sorted(table.items()):
            lines.append(f"{side},{bi},{bj},{z_e},{s_e}")
    for (i, u), deg in sorted(plan.useful_index.items()):
        lines.append(f"C,{i},{u},{deg},0")
    return "\n".join(lines) + "\n"
