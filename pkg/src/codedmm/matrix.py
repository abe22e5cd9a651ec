"""Integer matrix utilities: block partitioning, bounds, norms, and file I/O.

Matrices are plain 2-D numpy arrays throughout the package.  Canonical
inputs are signed 64-bit integers; the exact backend uses dtype ``object``
so entries become arbitrary-precision Python ints (or Fractions).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ValidationError

MAGIC = b"CDM1"
_TAG_I64 = 0
_I64_MIN = -(2**63)
_I64_MAX = 2**63 - 1


def _check_2d(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {M.shape}")
    return M


@dataclass(frozen=True)
class PartitionedMatrix:
    """A matrix together with its grid of equally sized blocks.

    ``block(i, j)`` is the tile in block-row i and block-column j; tiles
    cover the source exactly in row-major block order.
    """

    source: np.ndarray
    row_blocks: int
    col_blocks: int

    def __post_init__(self):
        rows, cols = self.source.shape
        if self.row_blocks < 1 or rows % self.row_blocks != 0:
            raise DimensionError(
                f"row_blocks={self.row_blocks} does not divide {rows} rows"
            )
        if self.col_blocks < 1 or cols % self.col_blocks != 0:
            raise DimensionError(
                f"col_blocks={self.col_blocks} does not divide {cols} cols"
            )

    @property
    def block_rows(self) -> int:
        return self.source.shape[0] // self.row_blocks

    @property
    def block_cols(self) -> int:
        return self.source.shape[1] // self.col_blocks

    def block(self, i: int, j: int) -> np.ndarray:
        if not (0 <= i < self.row_blocks and 0 <= j < self.col_blocks):
            raise IndexError(f"block ({i}, {j}) outside {self.row_blocks}x{self.col_blocks} grid")
        br, bc = self.block_rows, self.block_cols
        return self.source[i * br:(i + 1) * br, j * bc:(j + 1) * bc]

    def blocks(self) -> list[list[np.ndarray]]:
        return [[self.block(i, j) for j in range(self.col_blocks)]
                for i in range(self.row_blocks)]


def partition(M: np.ndarray, row_blocks: int, col_blocks: int) -> PartitionedMatrix:
    """Tile M into a row_blocks x col_blocks grid of equal submatrices."""
    return PartitionedMatrix(_check_2d(M), row_blocks, col_blocks)


def assemble(blocks) -> np.ndarray:
    """Reassemble a grid of blocks into one matrix (inverse of partition)."""
    if not blocks or not blocks[0]:
        raise DimensionError("empty block grid")
    ncols = len(blocks[0])
    for gi, row in enumerate(blocks):
        if len(row) != ncols:
            raise DimensionError(f"grid row {gi} has {len(row)} blocks, expected {ncols}")
        h = np.asarray(row[0]).shape[0]
        for gj, blk in enumerate(row):
            blk = _check_2d(blk, f"block ({gi},{gj})")
            if blk.shape[0] != h:
                raise DimensionError(
                    f"block ({gi},{gj}) has {blk.shape[0]} rows, grid row {gi} has {h}"
                )
    for gj in range(ncols):
        w = np.asarray(blocks[0][gj]).shape[1]
        for gi in range(len(blocks)):
            if np.asarray(blocks[gi][gj]).shape[1] != w:
                raise DimensionError(
                    f"block ({gi},{gj}) has {np.asarray(blocks[gi][gj]).shape[1]} cols, "
                    f"grid column {gj} has {w}"
                )
    return np.block([[np.asarray(b) for b in row] for row in blocks])


def max_abs(M: np.ndarray) -> int:
    """Largest entry magnitude, as a Python int."""
    M = _check_2d(M)
    if M.size == 0:
        raise ValidationError("empty matrix has no entry bound")
    return max(abs(int(e)) for e in M.flat) if M.dtype == object else int(np.abs(M).max())


def conservative_bound(A: np.ndarray, B: np.ndarray) -> int:
    """Entry-product bound L = v * max|A| * max|B| + 1 for C = A^T B.

    Strictly exceeds the magnitude of every entry of A^T B and of every
    partial sum of block products, because each output entry aggregates at
    most v elementary products.
    """
    A, B = _check_2d(A, "A"), _check_2d(B, "B")
    if A.size == 0 or B.size == 0:
        raise ValidationError("empty matrix")
    if A.shape[0] != B.shape[0]:
        raise DimensionError(f"A has {A.shape[0]} rows, B has {B.shape[0]}")
    v = A.shape[0]
    return v * max_abs(A) * max_abs(B) + 1


def frobenius_rel_error(C_ref: np.ndarray, C_hat: np.ndarray) -> float:
    """||C_ref - C_hat||_F / ||C_ref||_F."""
    C_ref, C_hat = _check_2d(C_ref, "C_ref"), _check_2d(C_hat, "C_hat")
    if C_ref.shape != C_hat.shape:
        raise DimensionError(f"shape mismatch: {C_ref.shape} vs {C_hat.shape}")
    ref = C_ref.astype(np.complex128) if np.iscomplexobj(C_ref) else C_ref.astype(np.float64)
    hat = C_hat.astype(np.complex128) if np.iscomplexobj(C_hat) else C_hat.astype(np.float64)
    denom = float(np.linalg.norm(ref))
    if denom == 0.0:
        raise ValidationError("reference matrix is identically zero")
    return float(np.linalg.norm(ref - hat)) / denom


def random_int_matrix(rows: int, cols: int, entry_bound: int,
                      signed: bool = False, seed: int = 0) -> np.ndarray:
    """Uniform random integer matrix, reproducible from seed.

    Entries lie in {0, ..., entry_bound} (or {-entry_bound, ..., entry_bound}
    when signed).
    """
    if rows < 1 or cols < 1:
        raise ValidationError("matrix dimensions must be positive")
    if entry_bound < 0 or entry_bound > _I64_MAX:
        raise ValidationError(f"entry bound {entry_bound} not representable")
    rng = np.random.default_rng(seed)
    low = -entry_bound if signed else 0
    return rng.integers(low, entry_bound + 1, size=(rows, cols), dtype=np.int64)


def reference_product(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """A^T B computed in integer arithmetic (int64 when it provably fits)."""
    A, B = _check_2d(A, "A"), _check_2d(B, "B")
    if A.shape[0] != B.shape[0]:
        raise DimensionError(f"A has {A.shape[0]} rows, B has {B.shape[0]}")
    if A.dtype != object and B.dtype != object:
        if A.shape[0] * max_abs(A) * max_abs(B) <= _I64_MAX:
            return A.T.astype(np.int64) @ B.astype(np.int64)
    return A.astype(object).T @ B.astype(object)


def int_matrix(rows: list[list[int]]) -> np.ndarray:
    """Array from nested int lists; int64 when it fits, object otherwise."""
    flat = [e for row in rows for e in row]
    if flat and all(_I64_MIN <= e <= _I64_MAX for e in flat):
        return np.array(rows, dtype=np.int64)
    return np.array(rows, dtype=object)


def write_matrix(M: np.ndarray, path) -> None:
    """Write the binary matrix format (magic CDM1, u32 dims, i64 entries)."""
    M = _check_2d(M)
    if M.size == 0:
        raise ValidationError("refusing to write an empty matrix")
    lo, hi = (min(M.flat), max(M.flat)) if M.dtype == object \
        else (int(M.min()), int(M.max()))
    if lo < _I64_MIN or hi > _I64_MAX:
        raise ValidationError("entries do not fit in signed 64-bit integers")
    rows, cols = M.shape
    with open(path, "wb") as f:
        f.write(struct.pack("<4sIIB", MAGIC, rows, cols, _TAG_I64))
        f.write(np.ascontiguousarray(M, dtype="<i8").tobytes())


def write_matrix_text(M: np.ndarray, path) -> None:
    """Write the whitespace text format: a "rows cols" header, then entries."""
    M = _check_2d(M)
    rows, cols = M.shape
    with open(path, "w") as f:
        f.write(f"{rows} {cols}\n")
        for r in range(rows):
            f.write(" ".join(str(int(e)) for e in M[r]) + "\n")


def read_matrix(path) -> np.ndarray:
    """Read either matrix file format (binary detected by magic bytes)."""
    with open(path, "rb") as f:
        head = f.read(4)
        if head == MAGIC:
            rows, cols, tag = struct.unpack("<IIB", f.read(9))
            if tag != _TAG_I64:
                raise ValidationError(f"unsupported element tag {tag}")
            data = np.frombuffer(f.read(rows * cols * 8), dtype="<i8")
            if data.size != rows * cols:
                raise ValidationError("truncated matrix file")
            return data.reshape(rows, cols).astype(np.int64)
    tokens = open(path).read().split()
    if len(tokens) < 2:
        raise ValidationError("text matrix needs a 'rows cols' header")
    rows, cols = int(tokens[0]), int(tokens[1])
    entries = [int(t) for t in tokens[2:]]
    if len(entries) != rows * cols:
        raise ValidationError(
            f"expected {rows * cols} entries, found {len(entries)}"
        )
    return int_matrix([entries[r * cols:(r + 1) * cols] for r in range(rows)])
