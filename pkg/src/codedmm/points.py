"""Evaluation-point generators and Vandermonde conditioning diagnostics."""

from __future__ import annotations

import cmath

import numpy as np

from .errors import SingularityError, ValidationError

POINT_KINDS = ("real", "unit", "integer")


def points_real_equispaced(K: int) -> list[float]:
    """K equally spaced reals covering [-1, 1] inclusive."""
    if K < 2:
        raise ValidationError("need at least 2 points to span [-1, 1]")
    return [-1.0 + 2.0 * i / (K - 1) for i in range(K)]


def points_unit_circle(K: int) -> list[complex]:
    """The K-th roots of unity, exp(2*pi*i*k/K)."""
    if K < 1:
        raise ValidationError("need at least 1 point")
    return [cmath.exp(2j * cmath.pi * k / K) for k in range(K)]


def points_integer(K: int) -> list[int]:
    """Distinct integers 1, -1, 2, -2, ... smallest magnitudes first,
    to limit coefficient growth in the exact pipeline."""
    if K < 1:
        raise ValidationError("need at least 1 point")
    out: list[int] = []
    mag = 1
    while len(out) < K:
        out.append(mag)
        if len(out) < K:
            out.append(-mag)
        mag += 1
    return out


def generate_points(kind: str, K: int) -> list:
    if kind == "real":
        return points_real_equispaced(K)
    if kind == "unit":
        return points_unit_circle(K)
    if kind == "integer":
        return points_integer(K)
    raise ValidationError(f"unknown point kind {kind!r}; expected one of {POINT_KINDS}")


def vandermonde_condition(points) -> float:
    """2-norm condition number of the square Vandermonde matrix on the
    given points (computed by direct SVD; the sizes here are small)."""
    points = list(points)
    if len(set(points)) != len(points):
        raise SingularityError("duplicate evaluation point")
    dtype = complex if any(isinstance(z, complex) for z in points) else float
    V = np.vander(np.asarray(points, dtype=dtype), increasing=True)
    return float(np.linalg.cond(V, 2))


def points_to_csv(points) -> str:
    """Serialize a point set as index,re,im rows."""
    lines = ["index,re,im"]
    for i, z in enumerate(points):
        zc = complex(z)
        lines.append(f"{i},{zc.real!r},{zc.imag!r}")
    return "\n".join(lines) + "\n"
