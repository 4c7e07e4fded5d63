"""Parity-check matrices and the MacKay alist interchange format.

The alist layout is: line 1 "n m"; line 2 "max_col_deg max_row_deg";
line 3 column degrees; line 4 row degrees; then n column index lists and
m row index lists, 1-based and zero-padded to the maximum degree.
Padding zeros are discarded on parse.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np


class AlistError(ValueError):
    """Malformed alist input; message names the offending line."""


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Sparse binary m x n matrix as row/column index lists (0-based)."""

    m: int
    n: int
    rows: tuple[tuple[int, ...], ...]  # per check: variable indices, ascending
    cols: tuple[tuple[int, ...], ...]  # per variable: check indices, ascending

    @property
    def row_degrees(self) -> tuple[int, ...]:
        return tuple(len(r) for r in self.rows)

    @property
    def col_degrees(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cols)

    def to_dense(self) -> np.ndarray:
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for j, row in enumerate(self.rows):
            H[j, list(row)] = 1
        return H

    def digest(self) -> str:
        """Stable hash of the code structure, for run manifests."""
        h = hashlib.sha256()
        h.update(f"{self.m} {self.n}".encode())
        for row in self.rows:
            h.update(b"|" + b",".join(str(i).encode() for i in row))
        return h.hexdigest()[:16]


def from_dense(H) -> ParityCheckMatrix:
    """Build a ParityCheckMatrix from a dense 0/1 array."""
    H = np.asarray(H)
    m, n = H.shape
    rows = tuple(tuple(int(i) for i in np.flatnonzero(H[j])) for j in range(m))
    cols = tuple(tuple(int(j) for j in np.flatnonzero(H[:, i])) for i in range(n))
    _validate(m, n, rows, cols)
    return ParityCheckMatrix(m=m, n=n, rows=rows, cols=cols)


def _validate(m: int, n: int, rows, cols) -> None:
    for j, row in enumerate(rows):
        if len(row) < 3:
            raise AlistError(f"row {j}: row degree < 3 unsupported")
        if any(not (0 <= i < n) for i in row):
            raise AlistError(f"row {j}: variable index out of range")
        if list(row) != sorted(set(row)):
            raise AlistError(f"row {j}: indices not strictly increasing")
    for i, col in enumerate(cols):
        if len(col) < 1:
            raise AlistError(f"column {i}: variable participates in no check")
        if any(not (0 <= j < m) for j in col):
            raise AlistError(f"column {i}: check index out of range")
        if list(col) != sorted(set(col)):
            raise AlistError(f"column {i}: indices not strictly increasing")
    # rows and cols must be mutual transposes
    from_rows = {(j, i) for j, row in enumerate(rows) for i in row}
    from_cols = {(j, i) for i, col in enumerate(cols) for j in col}
    if from_rows != from_cols:
        diff = sorted(from_rows ^ from_cols)[0]
        raise AlistError(
            f"row/column lists disagree at (check {diff[0]}, variable {diff[1]})"
        )


def parse_alist(text: str | bytes) -> ParityCheckMatrix:
    """Parse alist text; raises AlistError naming the bad line."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]

    def ints(idx: int, what: str) -> list[int]:
        if idx >= len(lines):
            raise AlistError(f"line {idx + 1}: missing {what}")
        try:
            return [int(t) for t in lines[idx].split()]
        except ValueError as exc:
            raise AlistError(f"line {idx + 1}: non-integer token in {what}") from exc

    header = ints(0, "header")
    if len(header) != 2:
        raise AlistError('line 1: expected header "n m"')
    n, m = header
    if n <= 0 or m <= 0:
        raise AlistError("line 1: n and m must be positive")
    maxdeg = ints(1, "max degrees")
    if len(maxdeg) != 2:
        raise AlistError('line 2: expected "max_col_deg max_row_deg"')
    col_deg = ints(2, "column degrees")
    row_deg = ints(3, "row degrees")
    if len(col_deg) != n:
        raise AlistError(f"line 3: expected {n} column degrees, got {len(col_deg)}")
    if len(row_deg) != m:
        raise AlistError(f"line 4: expected {m} row degrees, got {len(row_deg)}")

    def index_list(idx: int, deg: int, limit: int, what: str) -> tuple[int, ...]:
        vals = ints(idx, what)
        nz = [v for v in vals if v != 0]
        if len(nz) != deg:
            raise AlistError(
                f"line {idx + 1}: {what} has {len(nz)} nonzero entries, degree says {deg}"
            )
        out = []
        for v in nz:
            if not (1 <= v <= limit):
                raise AlistError(f"line {idx + 1}: index {v} out of range in {what}")
            out.append(v - 1)
        return tuple(sorted(out))

    cols = tuple(
        index_list(4 + i, col_deg[i], m, f"column list {i}") for i in range(n)
    )
    rows = tuple(
        index_list(4 + n + j, row_deg[j], n, f"row list {j}") for j in range(m)
    )
    try:
        _validate(m, n, rows, cols)
    except AlistError as exc:
        raise AlistError(str(exc)) from None
    return ParityCheckMatrix(m=m, n=n, rows=rows, cols=cols)


def load_alist(path) -> ParityCheckMatrix:
    with open(path, "rb") as fh:
        return parse_alist(fh.read())


def write_alist(path, H: ParityCheckMatrix) -> None:
    max_col = max(H.col_degrees)
    max_row = max(H.row_degrees)
    with open(path, "w") as fh:
        fh.write(f"{H.n} {H.m}\n")
        fh.write(f"{max_col} {max_row}\n")
        fh.write(" ".join(str(d) for d in H.col_degrees) + "\n")
        fh.write(" ".join(str(d) for d in H.row_degrees) + "\n")
        for col in H.cols:
            padded = [j + 1 for j in col] + [0] * (max_col - len(col))
            fh.write(" ".join(str(v) for v in padded) + "\n")
        for row in H.rows:
            padded = [i + 1 for i in row] + [0] * (max_row - len(row))
            fh.write(" ".join(str(v) for v in padded) + "\n")


def check_parity(H: ParityCheckMatrix, x) -> bool:
    """True iff every parity check of H has even weight on word x."""
    x = np.asarray(x)
    return all(int(sum(int(x[i]) for i in row)) % 2 == 0 for row in H.rows)
