"""Built-in code constructions.

- hamming74: the 3x7 Hamming parity-check matrix used throughout the tests.
- wimax_rate12: IEEE 802.16e rate-1/2 QC-LDPC codes. The base model matrix
  is defined for expansion factor 96; shifts scale as floor(p * z / 96).
  z = 24 gives the (576, 288) code, z = 48 the (1152, 576) code and z = 96
  the (2304, 1152) code.

Run ``python -m qpadmm_ldpc.codes OUTDIR`` to write the bundled codes as
alist files.
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .alist import ParityCheckMatrix, from_dense, write_alist

HAMMING74_DENSE = np.array(
    [
        [1, 1, 0, 1, 1, 0, 0],
        [1, 0, 1, 1, 0, 1, 0],
        [0, 1, 1, 1, 0, 0, 1],
    ],
    dtype=np.uint8,
)

# 802.16e rate-1/2 base model matrix (12 x 24); -1 marks an all-zero block.
_WIMAX_RATE12_BASE = [
    [-1, 94, 73, -1, -1, -1, -1, -1, 55, 83, -1, -1, 7, 0, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1],
    [-1, 27, -1, -1, -1, 22, 79, 9, -1, -1, -1, 12, -1, 0, 0, -1, -1, -1, -1, -1, -1, -1, -1, -1],
    [-1, -1, -1, 24, 22, 81, -1, 33, -1, -1, -1, 0, -1, -1, 0, 0, -1, -1, -1, -1, -1, -1, -1, -1],
    [61, -1, 47, -1, -1, -1, -1, -1, 65, 25, -1, -1, -1, -1, -1, 0, 0, -1, -1, -1, -1, -1, -1, -1],
    [-1, -1, 39, -1, -1, -1, 84, -1, -1, 41, 72, -1, -1, -1, -1, -1, 0, 0, -1, -1, -1, -1, -1, -1],
    [-1, -1, -1, -1, 46, 40, -1, 82, -1, -1, -1, 79, 0, -1, -1, -1, -1, 0, 0, -1, -1, -1, -1, -1],
    [-1, -1, 95, 53, -1, -1, -1, -1, -1, 14, 18, -1, -1, -1, -1, -1, -1, -1, 0, 0, -1, -1, -1, -1],
    [-1, 11, 73, -1, -1, -1, 2, -1, -1, 47, -1, -1, -1, -1, -1, -1, -1, -1, -1, 0, 0, -1, -1, -1],
    [12, -1, -1, -1, 83, 24, -1, 43, -1, -1, -1, 51, -1, -1, -1, -1, -1, -1, -1, -1, 0, 0, -1, -1],
    [-1, -1, -1, -1, -1, 94, -1, 59, -1, -1, 70, 72, -1, -1, -1, -1, -1, -1, -1, -1, -1, 0, 0, -1],
    [-1, -1, 7, 65, -1, -1, -1, -1, 39, 49, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 0, 0],
    [43, -1, -1, -1, -1, 66, -1, 41, -1, -1, -1, 26, 7, -1, -1, -1, -1, -1, -1, -1, -1, -1, -1, 0],
]


def hamming74() -> ParityCheckMatrix:
    return from_dense(HAMMING74_DENSE)


def wimax_rate12(z: int = 24) -> ParityCheckMatrix:
    """QC expansion of the rate-1/2 base matrix with factor z (24..96)."""
    if not (24 <= z <= 96):
        raise ValueError(f"expansion factor must be in [24, 96], got {z}")
    base = np.array(_WIMAX_RATE12_BASE)
    mb, nb = base.shape
    H = np.zeros((mb * z, nb * z), dtype=np.uint8)
    eye = np.eye(z, dtype=np.uint8)
    for bi in range(mb):
        for bj in range(nb):
            p = base[bi, bj]
            if p < 0:
                continue
            shift = p if p == 0 else (p * z) // 96
            H[bi * z : (bi + 1) * z, bj * z : (bj + 1) * z] = np.roll(
                eye, -shift, axis=1
            )
    return from_dense(H)


BUNDLED = {
    "hamming_7_4.alist": hamming74,
    "wimax_576_288.alist": lambda: wimax_rate12(24),
    "wimax_1152_576.alist": lambda: wimax_rate12(48),
    "wimax_2304_1152.alist": lambda: wimax_rate12(96),
}


def write_bundled(outdir) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, build in BUNDLED.items():
        path = outdir / name
        write_alist(path, build())
        written.append(path)
    return written


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "codes"
    for p in write_bundled(target):
        print(p)
